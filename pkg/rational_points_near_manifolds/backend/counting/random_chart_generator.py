"""This module provides a random polynomial chart generation."""
import random
from fractions import Fraction

from rational_points_near_manifolds.backend.funcspace.manifold_chart import ManifoldChart
from rational_points_near_manifolds.backend.funcspace.smooth_map import SmoothMap


class RandomChartGenerator:
    """A generator for random charts with rational polynomial maps."""

    def __init__(self, n, R, max_degree=3, max_terms=4, coefficient_bound=3, denominators=(1, 2, 3, 4),
                 radii=(Fraction(1, 4), Fraction(1, 3), Fraction(1, 2)), seed=None):
        """Initializes RandomChartGenerator.

        Args:
            n: The chart dimension.
            R: The codimension.
            max_degree: The maximal monomial degree.
            max_terms: The maximal number of monomials per map.
            coefficient_bound: The bound on the coefficient numerators.
            denominators: The admissible coefficient denominators.
            radii: The admissible chart radii.
            seed: The random seed.
        """
        self.n = n
        self.R = R
        self.max_degree = max_degree
        self.max_terms = max_terms
        self.coefficient_bound = coefficient_bound
        self.denominators = tuple(denominators)
        self.radii = tuple(radii)
        self.rng = random.Random(seed)

        self.chart = None

    def generate(self):
        """Generate a random chart.

        Returns:
            The generated chart.
        """
        x0 = [Fraction(self.rng.randint(-2, 2), self.rng.choice(self.denominators)) for _ in range(self.n)]
        eps0 = self.rng.choice(self.radii)
        maps = [SmoothMap(self._random_polynomial_text(), self.n) for _ in range(self.R)]
        self.chart = ManifoldChart(x0, eps0, maps, name="random")
        return self.chart

    def _random_coefficient(self):
        numerator = 0
        while numerator == 0:
            numerator = self.rng.randint(-self.coefficient_bound, self.coefficient_bound)
        return Fraction(numerator, self.rng.choice(self.denominators))

    def _random_monomial_text(self):
        degree = self.rng.randint(1, self.max_degree)
        factors = [f'x{self.rng.randint(1, self.n)}' for _ in range(degree)]
        return "*".join(sorted(factors))

    def _random_polynomial_text(self):
        """Creates the text of a random polynomial with rational coefficients.

        Returns:
            The expression text.
        """
        terms = []
        for _ in range(self.rng.randint(1, self.max_terms)):
            coefficient = self._random_coefficient()
            terms.append(f'({coefficient})*{self._random_monomial_text()}')
        return " + ".join(terms)
