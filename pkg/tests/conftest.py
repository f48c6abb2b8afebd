import sys
from decimal import Decimal, localcontext
from fractions import Fraction

import pytest


def decimal_ln(x: Fraction, digits: int = 60) -> Decimal:
    """ln of a positive rational through the decimal module, used as an independent oracle."""
    with localcontext() as ctx:
        ctx.prec = digits
        return (Decimal(x.numerator) / Decimal(x.denominator)).ln()


def dec(x: Fraction, digits: int = 60) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = digits
        return Decimal(x.numerator) / Decimal(x.denominator)


@pytest.fixture
def ln():
    return decimal_ln
