"""
Perfis φ de produtos torcidos dr² + φ(r)² g_S.

Em coordenadas normais cartesianas a métrica é g_ij = a(s) δ_ij + b(s) x_i x_j
com s = |x|², a = (φ/r)² e b = (1 - a)/s. Cada perfil fornece a, b e suas
derivadas em s até segunda ordem, além de φ e derivadas em r.
"""

from abc import ABC, abstractmethod
from typing import Dict, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy import special

from core.excecoes import ErroConfiguracao

CoeficientesMetrica = Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]


class PerfilTorcao(ABC):
    """Interface comum dos perfis"""

    nome = 'perfil'
    cauda_algebrica = False

    @abstractmethod
    def phi(self, r: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def dphi(self, r: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def d2phi(self, r: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def coeficientes_metrica(self, s: np.ndarray) -> CoeficientesMetrica:
        """(a, a', a'', b, b', b'') com derivadas em s = r²"""

    def curvatura_radial(self, r: np.ndarray) -> np.ndarray:
        """Curvatura seccional de planos radiais: -φ''/φ"""
        return -self.d2phi(r) / self.phi(r)

    def descrever(self) -> Dict:
        return {'nome': self.nome}


class PerfilPolinomial(PerfilTorcao):
    """
    φ(r) = Σ c_k r^{2k+1} com c_0 = 1. Então φ/r = P(s) é polinômio em s e
    a, b são polinômios exatos.
    """

    cauda_algebrica = True

    def __init__(self, coeficientes: Sequence[float], nome: str = None):
        coeficientes = [float(c) for c in coeficientes]
        if not coeficientes or abs(coeficientes[0] - 1.0) > 1e-14:
            raise ErroConfiguracao(
                'Perfil polinomial precisa de c_0 = 1 para a métrica ser suave no polo',
                {'modelo.parametros.coeficientes': ['O primeiro coeficiente deve ser 1.']},
            )
        self.coeficientes = tuple(coeficientes)
        self.nome = nome or 'polinomial'
        quociente = Polynomial(coeficientes)
        self._a = quociente ** 2
        um_menos_a = Polynomial([1.0]) - self._a
        # 1 - P² tem termo constante nulo: divisão exata por s
        self._b = Polynomial(um_menos_a.coef[1:]) if um_menos_a.coef.size > 1 else Polynomial([0.0])
        impares = np.zeros(2 * len(coeficientes))
        impares[1::2] = coeficientes
        self._phi = Polynomial(impares)

    def phi(self, r):
        return self._phi(r)

    def dphi(self, r):
        return self._phi.deriv(1)(r)

    def d2phi(self, r):
        return self._phi.deriv(2)(r)

    def coeficientes_metrica(self, s):
        a, b = self._a, self._b
        return a(s), a.deriv(1)(s), a.deriv(2)(s), b(s), b.deriv(1)(s), b.deriv(2)(s)

    def descrever(self):
        return {'nome': self.nome, 'coeficientes': list(self.coeficientes)}


class PerfilSinh(PerfilTorcao):
    """φ = sinh r (espaço hiperbólico em coordenadas normais)"""

    nome = 'sinh'
    _TERMOS = 30

    def __init__(self):
        j = np.arange(self._TERMOS + 1)
        alfa = 4.0 ** (j + 1) / (2.0 * special.factorial(2 * j + 2))
        self._serie_a = Polynomial(alfa[:-1])
        self._serie_b = Polynomial(-alfa[1:])

    def phi(self, r):
        return np.sinh(r)

    def dphi(self, r):
        return np.cosh(r)

    def d2phi(self, r):
        return np.sinh(r)

    def coeficientes_metrica(self, s):
        s = np.asarray(s, dtype=float)
        perto = s < 1.0
        r = np.sqrt(np.where(perto, 1.0, s))
        u = np.sinh(r) / r
        u_r = np.cosh(r) / r - np.sinh(r) / r ** 2
        u_rr = np.sinh(r) / r - 2.0 * np.cosh(r) / r ** 2 + 2.0 * np.sinh(r) / r ** 3
        a = u ** 2
        a_r = 2.0 * u * u_r
        a_rr = 2.0 * u_r ** 2 + 2.0 * u * u_rr
        b = (1.0 - a) / r ** 2
        b_r = -a_r / r ** 2 - 2.0 * (1.0 - a) / r ** 3
        b_rr = -a_rr / r ** 2 + 4.0 * a_r / r ** 3 + 6.0 * (1.0 - a) / r ** 4
        longe = (
            a,
            a_r / (2.0 * r),
            (a_rr - a_r / r) / (4.0 * r ** 2),
            b,
            b_r / (2.0 * r),
            (b_rr - b_r / r) / (4.0 * r ** 2),
        )
        sa, sb = self._serie_a, self._serie_b
        serie = (sa(s), sa.deriv(1)(s), sa.deriv(2)(s), sb(s), sb.deriv(1)(s), sb.deriv(2)(s))
        return tuple(np.where(perto, valor_serie, valor_longe) for valor_serie, valor_longe in zip(serie, longe))


EPSILON_OSCILANTE = 0.1

# φ'' = ε r (r² - 1)(r² - 4): curvatura radial muda de sinal em r = 1 e r = 2
PERFIS_EMBUTIDOS = {
    'sinh': lambda: PerfilSinh(),
    'r_mais_r3': lambda: PerfilPolinomial([1.0, 1.0], nome='r_mais_r3'),
    'oscilante': lambda: PerfilPolinomial(
        [1.0, 2.0 * EPSILON_OSCILANTE / 3.0, -EPSILON_OSCILANTE / 4.0, EPSILON_OSCILANTE / 42.0],
        nome='oscilante',
    ),
    'linear': lambda: PerfilPolinomial([1.0], nome='linear'),
}


def obter_perfil(perfil) -> PerfilTorcao:
    """Aceita nome embutido, lista de coeficientes ímpares ou instância"""
    if isinstance(perfil, PerfilTorcao):
        return perfil
    if isinstance(perfil, str):
        if perfil not in PERFIS_EMBUTIDOS:
            raise ErroConfiguracao(
                f'Perfil desconhecido: {perfil}',
                {'modelo.parametros.perfil': [f'Opções válidas: {", ".join(sorted(PERFIS_EMBUTIDOS))}.']},
            )
        return PERFIS_EMBUTIDOS[perfil]()
    return PerfilPolinomial(perfil)
