import util.fmt as fmt
from shop.cart import Cart
from util.parse import parse_qty


def main(argv):
    qty = parse_qty(argv[1])
    total = Cart.quick_total(qty, 2.5)
    print(fmt.money(total))
    return total
