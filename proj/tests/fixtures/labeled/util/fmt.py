def money(value):
    return "$" + format(value, ".2f")


def banner(text):
    line = "=" * len(text)
    print(line)
    print(text)
    print(line)
