#include <gtest/gtest.h>

#include <regex>

#include "repodoc/doc_pipeline.hpp"
#include "repodoc/markdown_publisher.hpp"
#include "test_util.hpp"

using namespace repodoc;
using namespace repodoc::testing;

namespace {

RepoGraph graph_of(const std::map<std::string, std::string>& files) {
  std::vector<std::string> paths;
  std::vector<FileParse> parses;
  for (const auto& [p, text] : files) {
    paths.push_back(p);
    parses.push_back(parse_file(p, text));
  }
  return build_graph(paths, parses);
}

RepoGraph demo_graph() {
  const auto root = fixture("demo");
  const auto files = scan_repository(root, {});
  return build_graph(files, parse_files(root, files));
}

DocStore generated(const RepoGraph& g) {
  Gateway gw(std::make_unique<MockProvider>(), {}, [](auto) {});
  DocStore store;
  PipelineOptions o;
  o.clock = [] { return std::string("t"); };
  (void)generate_all(g, gw, store, o);
  return store;
}

std::vector<std::string> headings(const std::string& body) {
  std::vector<std::string> out;
  std::istringstream in(body);
  std::string line;
  while (std::getline(in, line)) {
    if (line.starts_with("#")) out.push_back(line);
  }
  return out;
}

std::vector<std::string> files_under(const fs::path& dir) {
  std::vector<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), dir).generic_string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(PagePath, MirrorsSource) {
  EXPECT_EQ(page_path_for("a.py"), "a.md");
  EXPECT_EQ(page_path_for("util/b.py"), "util/b.md");
  EXPECT_EQ(page_path_for("x.y/z.py"), "x.y/z.md");
}

TEST(CompileFileDoc, DemoHeadingsInSourceOrder) {
  const RepoGraph g = demo_graph();
  const DocPage page = compile_file_doc(g, "a.py", generated(g));
  EXPECT_EQ(page.output_path, "a.md");
  EXPECT_EQ(headings(page.body), (std::vector<std::string>{"# a.py", "## ClassDef C", "### FunctionDef m",
                                                            "## FunctionDef f", "## FunctionDef g"}));
}

TEST(CompileFileDoc, EmptyFileHasOnlyTitle) {
  const RepoGraph g = graph_of({{"e.py", ""}});
  const DocPage page = compile_file_doc(g, "e.py", DocStore{});
  EXPECT_EQ(page.body, "# e.py\n");
}

TEST(CompileFileDoc, DepthCappedAtSix) {
  std::string src;
  std::string indent;
  for (int i = 0; i < 7; ++i) {
    src += indent + "def d" + std::to_string(i) + "():\n";
    indent += "    ";
  }
  src += indent + "return 1\n";
  const RepoGraph g = graph_of({{"deep.py", src}});
  const auto h = headings(compile_file_doc(g, "deep.py", DocStore{}).body);
  EXPECT_EQ(h, (std::vector<std::string>{"# deep.py", "## FunctionDef d0", "### FunctionDef d1",
                                         "#### FunctionDef d2", "##### FunctionDef d3", "###### FunctionDef d4",
                                         "###### FunctionDef d5", "###### FunctionDef d6"}));
}

TEST(CompileFileDoc, MissingRecordPlaceholder) {
  const RepoGraph g = graph_of({{"a.py", "def f():\n    return 1\n"}});
  const std::string body = compile_file_doc(g, "a.py", DocStore{}).body;
  EXPECT_NE(body.find("*Documentation for this object has not been generated yet.*"), std::string::npos);
}

TEST(RenderObject, BoldSectionsAndBulletParams) {
  const RepoGraph g = demo_graph();
  const DocStore store = generated(g);
  const std::string md = render_object(*g.object("a.py/g"), store.record("a.py/g"), 0);
  EXPECT_EQ(md,
            "## FunctionDef g\n\n"
            "**g**: The function of g is g stub.\n\n"
            "**parameters**:\n- `x`: stub description of x.\n\n"
            "**Code Description**: g is a function stub for offline runs.\n\n"
            "**Note**: Generated by the mock provider.\n\n"
            "**Output Example**: g stub output.\n\n");
}

TEST(WriteSite, DemoLayoutAndSummary) {
  TempDir dir;
  const RepoGraph g = demo_graph();
  const auto out = dir.path() / "markdown_docs";
  const SiteResult r = write_site(g, generated(g), out);
  EXPECT_EQ(r.pages, (std::vector<std::string>{"SUMMARY.md", "a.md", "util/b.md"}));
  EXPECT_EQ(r.written, r.pages);
  EXPECT_EQ(files_under(out), r.pages);
  EXPECT_EQ(read_file(out / "SUMMARY.md"), "# Summary\n\n- [a.py](a.md)\n- util/\n  - [b.py](util/b.md)\n");
}

TEST(WriteSite, RepublishIsByteIdenticalAndWritesNothing) {
  TempDir dir;
  const RepoGraph g = demo_graph();
  const DocStore store = generated(g);
  (void)write_site(g, store, dir.path());
  std::map<std::string, std::string> before;
  for (const auto& f : files_under(dir.path())) before[f] = read_file(dir.path() / f);
  const SiteResult again = write_site(g, store, dir.path());
  EXPECT_TRUE(again.written.empty());
  for (const auto& [f, content] : before) EXPECT_EQ(read_file(dir.path() / f), content);
}

TEST(WriteSite, DeletedFileRemovesPageAndSummaryEntry) {
  TempDir dir;
  RepoGraph g = demo_graph();
  (void)write_site(g, generated(g), dir.path());
  const RepoGraph smaller = graph_of({{"a.py", read_file(fixture("demo") / "a.py")}});
  const SiteResult r = write_site(smaller, generated(smaller), dir.path());
  EXPECT_EQ(r.removed, (std::vector<std::string>{"util/b.md"}));
  EXPECT_FALSE(fs::exists(dir.path() / "util"));
  EXPECT_EQ(read_file(dir.path() / "SUMMARY.md"), "# Summary\n\n- [a.py](a.md)\n");
}

TEST(WriteSite, SummaryLinksMatchPagesAndObjectsAppearOnce) {
  TempDir dir;
  const RepoGraph g = graph_of({{"p/q/r.py", "def a():\n    return 1\n"},
                                {"p/s.py", "class K:\n    def b(self):\n        pass\n"},
                                {"t.py", "def c():\n    pass\n"}});
  const SiteResult r = write_site(g, generated(g), dir.path());
  const std::string summary = read_file(dir.path() / "SUMMARY.md");
  std::set<std::string> links;
  const std::regex link(R"(\]\(([^)]+)\))");
  for (auto it = std::sregex_iterator(summary.begin(), summary.end(), link); it != std::sregex_iterator(); ++it) {
    links.insert((*it)[1]);
  }
  std::set<std::string> pages(r.pages.begin(), r.pages.end());
  pages.erase("SUMMARY.md");
  EXPECT_EQ(links, pages);

  std::map<std::string, int> seen;
  for (const auto& p : pages) {
    for (const auto& h : headings(read_file(dir.path() / p))) {
      if (h.find("Def ") != std::string::npos) ++seen[h.substr(h.find("Def ") + 4)];
    }
  }
  EXPECT_EQ(seen, (std::map<std::string, int>{{"K", 1}, {"a", 1}, {"b", 1}, {"c", 1}}));
}

TEST(WriteSite, UnwritableDirIsIoError) {
  TempDir dir;
  write_file(dir.path() / "blocker", "x");
  const RepoGraph g = demo_graph();
  try {
    (void)write_site(g, DocStore{}, dir.path() / "blocker" / "docs");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
}
