"""This module provides the Radon-Hurwitz number."""


def radon_hurwitz(n):
    """Computes rho(n) = 8a + 2^b for n = m 2^(4a + b), m odd, 0 <= b <= 3.

    Args:
        n: A positive integer.

    Returns:
        The Radon-Hurwitz number.
    """
    if int(n) != n or n < 1:
        raise ValueError(f'Radon-Hurwitz number needs a positive integer, got {n}.')
    n = int(n)
    exponent = (n & -n).bit_length() - 1
    a, b = divmod(exponent, 4)
    return 8 * a + 2 ** b
