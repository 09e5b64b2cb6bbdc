"""
Abstração de variedade em uma única carta e os modelos concretos.

Todas as funções de métrica são vetorizadas: recebem coordenadas com forma
(..., n) e devolvem g (..., n, n), ∂g (..., n, n, n) com ∂g[..., a, b, c] =
∂_c g_ab e ∂²g (..., n, n, n, n) com ∂²g[..., a, b, c, d] = ∂_c ∂_d g_ab.
"""

from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from core.configuracao import parametro
from core.excecoes import ErroDominio, ErroPrecondicao
from core.numerica import area_esfera

from .perfis import PerfilTorcao, obter_perfil

FuncaoMetrica = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Dominio:
    """Restrição de coordenadas da carta: 'livre', 'bola', 'semiespaco' ou 'faixa_radial'"""

    tipo: str = 'livre'
    raio: float = np.inf
    eixo: int = -1

    def contem(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        finito = np.all(np.isfinite(x), axis=-1)
        if self.tipo == 'livre':
            return finito
        if self.tipo == 'bola':
            return finito & (np.einsum('...i,...i->...', x, x) < self.raio ** 2)
        if self.tipo == 'semiespaco':
            return finito & (x[..., self.eixo] > 0.0)
        if self.tipo == 'faixa_radial':
            return finito & (x[..., 0] > 0.0) & (x[..., 0] < self.raio)
        raise ValueError(f'Tipo de domínio desconhecido: {self.tipo}')

    def descrever(self) -> Dict:
        return {'tipo': self.tipo, 'raio': None if np.isinf(self.raio) else self.raio}


@dataclass(frozen=True)
class Bandeiras:
    """Hipóteses declaradas pelo modelo"""

    sem_pontos_focais: bool = False
    sem_pontos_conjugados: bool = False
    ricci_negativo: bool = False
    h_assintotico: Optional[float] = None
    curvatura_constante: Optional[float] = None
    harmonica: bool = False
    cauda_algebrica: bool = False

    def como_dict(self) -> Dict:
        return {
            'sem_pontos_focais': self.sem_pontos_focais,
            'sem_pontos_conjugados': self.sem_pontos_conjugados,
            'ricci_negativo': self.ricci_negativo,
            'h_assintotico': self.h_assintotico,
            'curvatura_constante': self.curvatura_constante,
            'harmonica': self.harmonica,
            'cauda_algebrica': self.cauda_algebrica,
        }


@dataclass(frozen=True)
class Oraculos:
    """
    Fórmulas fechadas opcionais.

    distancia(p, q); busemann(v, x) com v unitário na origem do modelo;
    densidade_area(r) para modelos harmônicos; curvatura_radial(r) para
    produtos torcidos.
    """

    distancia: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    busemann: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    densidade_area: Optional[Callable[[np.ndarray], np.ndarray]] = None
    curvatura_radial: Optional[Callable[[np.ndarray], np.ndarray]] = None


@dataclass(frozen=True)
class Fator:
    """Fator folha de um produto e a fatia de coordenadas que ocupa"""

    modelo: 'VariedadeCarta'
    inicio: int
    fim: int


@dataclass(frozen=True, eq=False)
class VariedadeCarta:
    """Variedade riemanniana descrita por uma única carta global"""

    nome: str
    dim: int
    metrica_fn: FuncaoMetrica
    dominio: Dominio = field(default_factory=Dominio)
    derivadas_fn: Optional[FuncaoMetrica] = None
    segundas_derivadas_fn: Optional[FuncaoMetrica] = None
    bandeiras: Bandeiras = field(default_factory=Bandeiras)
    oraculos: Oraculos = field(default_factory=Oraculos)
    origem: Optional[np.ndarray] = None
    parametros: Dict = field(default_factory=dict)
    tolerancias: Dict = field(default_factory=dict)
    fatores: Tuple[Fator, ...] = ()

    def __post_init__(self):
        origem = np.zeros(self.dim) if self.origem is None else np.asarray(self.origem, dtype=float)
        object.__setattr__(self, 'origem', origem)

    # Métrica e derivadas

    def metrica(self, x: np.ndarray) -> np.ndarray:
        return self.metrica_fn(np.asarray(x, dtype=float))

    def derivadas_metrica(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.derivadas_fn is not None:
            return self.derivadas_fn(x)
        return _diferencas_centrais(self.metrica_fn, x, self.passo_diferencas)

    def segundas_derivadas_metrica(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.segundas_derivadas_fn is not None:
            return self.segundas_derivadas_fn(x)
        return _diferencas_centrais(self.derivadas_metrica, x, self.passo_diferencas)

    @property
    def passo_diferencas(self) -> float:
        return self.tolerancias.get('passo_diferencas', parametro('PASSO_DIFERENCAS'))

    def tolerancia(self, nome: str, padrao: float) -> float:
        return float(self.tolerancias.get(nome, padrao))

    # Domínio

    def no_dominio(self, x: np.ndarray) -> np.ndarray:
        return self.dominio.contem(x)

    def exigir_dominio(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ErroPrecondicao(
                f'Coordenadas com dimensão {x.shape[-1]} para o modelo {self.nome} (dim {self.dim})'
            )
        if not np.all(self.no_dominio(x)):
            raise ErroDominio(f'Ponto fora do domínio da carta de {self.nome}', ponto=x)
        return x

    # Vetores tangentes

    def produto_interno(self, x, u, w) -> np.ndarray:
        return np.einsum('...i,...ij,...j->...', u, self.metrica(x), w)

    def norma(self, x, v) -> np.ndarray:
        return np.sqrt(self.produto_interno(x, v, v))

    def normalizar(self, x, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        norma = self.norma(x, v)
        if np.any(norma <= 0.0):
            raise ErroPrecondicao('Vetor tangente nulo não pode ser normalizado')
        return v / norma[..., None]

    def exigir_unitario(self, x, v, tolerancia: float = 1e-8) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        desvio = np.abs(self.produto_interno(x, v, v) - 1.0)
        if np.any(desvio > tolerancia):
            raise ErroPrecondicao('Vetor tangente não unitário', desvio=float(np.max(desvio)))
        return v

    def com_tolerancias(self, tolerancias: Dict) -> 'VariedadeCarta':
        return replace(self, tolerancias={**self.tolerancias, **tolerancias})

    def descrever(self) -> Dict:
        return {
            'nome': self.nome,
            'dim': self.dim,
            'dominio': self.dominio.descrever(),
            'derivadas_analiticas': self.derivadas_fn is not None,
            'bandeiras': self.bandeiras.como_dict(),
            'oraculos': sorted(nome for nome in ('distancia', 'busemann', 'densidade_area', 'curvatura_radial')
                               if getattr(self.oraculos, nome) is not None),
            'parametros': self.parametros,
        }


def _diferencas_centrais(funcao: FuncaoMetrica, x: np.ndarray, passo_base: float) -> np.ndarray:
    """Derivada por diferenças centrais; o último eixo da saída é a coordenada"""
    n = x.shape[-1]
    passos = passo_base * np.maximum(1.0, np.abs(x))
    colunas = []
    for k in range(n):
        deslocamento = np.zeros_like(x)
        deslocamento[..., k] = passos[..., k]
        diferenca = funcao(x + deslocamento) - funcao(x - deslocamento)
        escala = (2.0 * passos[..., k]).reshape(passos.shape[:-1] + (1,) * (diferenca.ndim - x.ndim + 1))
        colunas.append(diferenca / escala)
    return np.stack(colunas, axis=-1)


# Métricas conformes g = c(x) δ

def _conforme(c, dc, d2c, n: int):
    identidade = np.eye(n)
    metrica = lambda x: c(x)[..., None, None] * identidade
    derivadas = lambda x: np.einsum('ab,...c->...abc', identidade, dc(x))
    segundas = lambda x: np.einsum('ab,...cd->...abcd', identidade, d2c(x))
    return metrica, derivadas, segundas


def _fator_estereografico(epsilon: float):
    """c = 4 (1 + ε|x|²)^{-2}: ε = -1 bola de Poincaré, ε = +1 esfera"""

    def c(x):
        w = 1.0 + epsilon * np.einsum('...i,...i->...', x, x)
        return 4.0 / w ** 2

    def dc(x):
        w = 1.0 + epsilon * np.einsum('...i,...i->...', x, x)
        return -16.0 * epsilon * x / w[..., None] ** 3

    def d2c(x):
        n = x.shape[-1]
        w = 1.0 + epsilon * np.einsum('...i,...i->...', x, x)
        return (
            -16.0 * epsilon * np.eye(n) / w[..., None, None] ** 3
            + 96.0 * np.einsum('...k,...l->...kl', x, x) / w[..., None, None] ** 4
        )

    return c, dc, d2c


def euclidiano(n: int) -> VariedadeCarta:
    """R^n com a métrica plana"""
    identidade = np.eye(n)
    return VariedadeCarta(
        nome=f'euclidean({n})',
        dim=n,
        metrica_fn=lambda x: np.broadcast_to(identidade, x.shape[:-1] + (n, n)).copy(),
        derivadas_fn=lambda x: np.zeros(x.shape[:-1] + (n, n, n)),
        segundas_derivadas_fn=lambda x: np.zeros(x.shape[:-1] + (n, n, n, n)),
        bandeiras=Bandeiras(
            sem_pontos_focais=True, sem_pontos_conjugados=True, h_assintotico=0.0,
            curvatura_constante=0.0, harmonica=True, cauda_algebrica=True,
        ),
        oraculos=Oraculos(
            distancia=lambda p, q: np.linalg.norm(np.asarray(q) - np.asarray(p), axis=-1),
            busemann=lambda v, x: -np.einsum('...i,...i->...', v, x),
            densidade_area=lambda r: area_esfera(n) * np.asarray(r, dtype=float) ** (n - 1),
        ),
        parametros={'dimensao': n},
    )


def _distancia_bola(p, q):
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    diferenca = np.einsum('...i,...i->...', q - p, q - p)
    wp = 1.0 - np.einsum('...i,...i->...', p, p)
    wq = 1.0 - np.einsum('...i,...i->...', q, q)
    return np.arccosh(1.0 + 2.0 * diferenca / (wp * wq))


def _busemann_bola(v, x):
    """Busemann normalizado na origem: b(x) = log(|x - ξ|² / (1 - |x|²))"""
    v, x = np.asarray(v, dtype=float), np.asarray(x, dtype=float)
    xi = v / np.linalg.norm(v, axis=-1, keepdims=True)
    return np.log(np.einsum('...i,...i->...', x - xi, x - xi) / (1.0 - np.einsum('...i,...i->...', x, x)))


def bola_hiperbolica(n: int) -> VariedadeCarta:
    """H^n no modelo da bola de Poincaré, curvatura -1"""
    metrica, derivadas, segundas = _conforme(*_fator_estereografico(-1.0), n)
    return VariedadeCarta(
        nome=f'hyperbolic_ball({n})',
        dim=n,
        metrica_fn=metrica,
        derivadas_fn=derivadas,
        segundas_derivadas_fn=segundas,
        dominio=Dominio('bola', raio=1.0),
        bandeiras=Bandeiras(
            sem_pontos_focais=True, sem_pontos_conjugados=True, ricci_negativo=True,
            h_assintotico=float(n - 1), curvatura_constante=-1.0, harmonica=True,
        ),
        oraculos=Oraculos(
            distancia=_distancia_bola,
            busemann=_busemann_bola,
            densidade_area=lambda r: area_esfera(n) * np.sinh(np.asarray(r, dtype=float)) ** (n - 1),
        ),
        parametros={'dimensao': n},
    )


def _distancia_semiespaco(p, q):
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    diferenca = np.einsum('...i,...i->...', q - p, q - p)
    return np.arccosh(1.0 + diferenca / (2.0 * p[..., -1] * q[..., -1]))


def _busemann_semiespaco(v, x):
    """
    Busemann com origem e_n. Direção vertical para cima: b = -log x_n; caso
    contrário o ponto ideal é ξ = (c + sqrt(c² + 1)) û com c = v_n / |v'|
    (ξ = 0 para a vertical para baixo).
    """
    v, x = np.asarray(v, dtype=float), np.asarray(x, dtype=float)
    horizontal = v[..., :-1]
    modulo = np.linalg.norm(horizontal, axis=-1)
    vertical = modulo <= 1e-15 * np.abs(v[..., -1])
    modulo_seguro = np.where(vertical, 1.0, modulo)
    c = v[..., -1] / modulo_seguro
    xi = ((c + np.sqrt(c ** 2 + 1.0)) / modulo_seguro)[..., None] * horizontal
    deslocamento = x[..., :-1] - xi
    altura = x[..., -1]
    finito = (
        np.log((np.einsum('...i,...i->...', deslocamento, deslocamento) + altura ** 2) / altura)
        - np.log(np.einsum('...i,...i->...', xi, xi) + 1.0)
    )
    return np.where(vertical & (v[..., -1] > 0), -np.log(altura), finito)


def semiespaco_hiperbolico(n: int) -> VariedadeCarta:
    """H^n no semiespaço superior {x_n > 0}, g = δ / x_n²"""

    def c(x):
        return 1.0 / x[..., -1] ** 2

    def dc(x):
        derivada = np.zeros_like(x)
        derivada[..., -1] = -2.0 / x[..., -1] ** 3
        return derivada

    def d2c(x):
        derivada = np.zeros(x.shape + (n,))
        derivada[..., -1, -1] = 6.0 / x[..., -1] ** 4
        return derivada

    metrica, derivadas, segundas = _conforme(c, dc, d2c, n)
    origem = np.zeros(n)
    origem[-1] = 1.0
    return VariedadeCarta(
        nome=f'hyperbolic_upper({n})',
        dim=n,
        metrica_fn=metrica,
        derivadas_fn=derivadas,
        segundas_derivadas_fn=segundas,
        dominio=Dominio('semiespaco', eixo=-1),
        bandeiras=Bandeiras(
            sem_pontos_focais=True, sem_pontos_conjugados=True, ricci_negativo=True,
            h_assintotico=float(n - 1), curvatura_constante=-1.0, harmonica=True,
        ),
        oraculos=Oraculos(
            distancia=_distancia_semiespaco,
            busemann=_busemann_semiespaco,
            densidade_area=lambda r: area_esfera(n) * np.sinh(np.asarray(r, dtype=float)) ** (n - 1),
        ),
        origem=origem,
        parametros={'dimensao': n},
    )


def _distancia_esfera(p, q):
    def levantar(x):
        quadrado = np.einsum('...i,...i->...', x, x)
        return np.concatenate([2.0 * x, (quadrado - 1.0)[..., None]], axis=-1) / (1.0 + quadrado)[..., None]

    cosseno = np.einsum('...i,...i->...', levantar(np.asarray(p, float)), levantar(np.asarray(q, float)))
    return np.arccos(np.clip(cosseno, -1.0, 1.0))


RAIO_GUARDA_ESFERA = 50.0


def esfera2() -> VariedadeCarta:
    """S² em projeção estereográfica (carta sem o polo, com faixa de guarda)"""
    metrica, derivadas, segundas = _conforme(*_fator_estereografico(1.0), 2)
    return VariedadeCarta(
        nome='sphere2',
        dim=2,
        metrica_fn=metrica,
        derivadas_fn=derivadas,
        segundas_derivadas_fn=segundas,
        dominio=Dominio('bola', raio=RAIO_GUARDA_ESFERA),
        bandeiras=Bandeiras(curvatura_constante=1.0, harmonica=True),
        oraculos=Oraculos(
            distancia=_distancia_esfera,
            densidade_area=lambda r: 2.0 * np.pi * np.sin(np.asarray(r, dtype=float)),
        ),
        parametros={},
    )


def _metrica_torcida_normal(perfil: PerfilTorcao, n: int):
    identidade = np.eye(n)

    def metrica(x):
        s = np.einsum('...i,...i->...', x, x)
        a, _, _, b, _, _ = perfil.coeficientes_metrica(s)
        return a[..., None, None] * identidade + b[..., None, None] * np.einsum('...i,...j->...ij', x, x)

    def derivadas(x):
        s = np.einsum('...i,...i->...', x, x)
        _, a1, _, b, b1, _ = perfil.coeficientes_metrica(s)
        xx = np.einsum('...i,...j->...ij', x, x)
        return (
            2.0 * a1[..., None, None, None] * np.einsum('ij,...k->...ijk', identidade, x)
            + 2.0 * b1[..., None, None, None] * np.einsum('...ij,...k->...ijk', xx, x)
            + b[..., None, None, None] * (
                np.einsum('ik,...j->...ijk', identidade, x) + np.einsum('jk,...i->...ijk', identidade, x)
            )
        )

    def segundas(x):
        s = np.einsum('...i,...i->...', x, x)
        _, a1, a2, b, b1, b2 = perfil.coeficientes_metrica(s)
        d = identidade
        xx = np.einsum('...i,...j->...ij', x, x)
        e = lambda coef: coef[..., None, None, None, None]
        termos = (
            4.0 * e(a2) * np.einsum('ij,...k,...l->...ijkl', d, x, x)
            + 2.0 * e(a1) * np.einsum('ij,kl->ijkl', d, d)
            + 4.0 * e(b2) * np.einsum('...ij,...k,...l->...ijkl', xx, x, x)
            + 2.0 * e(b1) * (
                np.einsum('kl,...ij->...ijkl', d, xx)
                + np.einsum('il,...jk->...ijkl', d, xx)
                + np.einsum('jl,...ik->...ijkl', d, xx)
                + np.einsum('ik,...j,...l->...ijkl', d, x, x)
                + np.einsum('jk,...i,...l->...ijkl', d, x, x)
            )
            + e(b) * (np.einsum('ik,jl->ijkl', d, d) + np.einsum('il,jk->ijkl', d, d))
        )
        return termos

    return metrica, derivadas, segundas


def _metrica_torcida_polar(perfil: PerfilTorcao):
    """Carta (r, θ) em dimensão 2: g = diag(1, φ(r)²)"""

    def metrica(x):
        g = np.zeros(x.shape[:-1] + (2, 2))
        g[..., 0, 0] = 1.0
        g[..., 1, 1] = perfil.phi(x[..., 0]) ** 2
        return g

    def derivadas(x):
        dg = np.zeros(x.shape[:-1] + (2, 2, 2))
        r = x[..., 0]
        dg[..., 1, 1, 0] = 2.0 * perfil.phi(r) * perfil.dphi(r)
        return dg

    def segundas(x):
        d2g = np.zeros(x.shape[:-1] + (2, 2, 2, 2))
        r = x[..., 0]
        d2g[..., 1, 1, 0, 0] = 2.0 * (perfil.dphi(r) ** 2 + perfil.phi(r) * perfil.d2phi(r))
        return d2g

    return metrica, derivadas, segundas


BANDEIRAS_PERFIS = {
    'sinh': dict(sem_pontos_focais=True, sem_pontos_conjugados=True, ricci_negativo=True, curvatura_constante=-1.0,
                 harmonica=True),
    'r_mais_r3': dict(sem_pontos_focais=True, sem_pontos_conjugados=True, ricci_negativo=True, cauda_algebrica=True),
    'oscilante': dict(sem_pontos_focais=True, sem_pontos_conjugados=True, cauda_algebrica=True),
    'linear': dict(sem_pontos_focais=True, sem_pontos_conjugados=True, curvatura_constante=0.0, harmonica=True,
                   h_assintotico=0.0, cauda_algebrica=True),
}

RAIO_PADRAO_TORCIDO = {'sinh': 6.0}


def produto_torcido(perfil, dimensao: int = 2, carta: str = 'normal', raio_maximo: float = None) -> VariedadeCarta:
    """
    Modelo rotacionalmente simétrico dr² + φ(r)² g_S.

    A carta 'normal' usa coordenadas normais cartesianas no polo; a carta
    'polar' (só dimensão 2) usa (r, θ).
    """
    perfil = obter_perfil(perfil)
    raio = raio_maximo or RAIO_PADRAO_TORCIDO.get(perfil.nome, 10.0)
    bandeiras = Bandeiras(**BANDEIRAS_PERFIS.get(perfil.nome, dict(cauda_algebrica=perfil.cauda_algebrica)))
    if bandeiras.curvatura_constante == -1.0:
        bandeiras = replace(bandeiras, h_assintotico=float(dimensao - 1))
    densidade = lambda r: area_esfera(dimensao) * perfil.phi(np.asarray(r, dtype=float)) ** (dimensao - 1)
    if carta == 'polar':
        if dimensao != 2:
            raise ErroPrecondicao('A carta polar só existe em dimensão 2')
        metrica, derivadas, segundas = _metrica_torcida_polar(perfil)
        dominio = Dominio('faixa_radial', raio=raio)
        origem = np.array([1.0, 0.0])
    else:
        metrica, derivadas, segundas = _metrica_torcida_normal(perfil, dimensao)
        dominio = Dominio('bola', raio=raio)
        origem = np.zeros(dimensao)
    return VariedadeCarta(
        nome=f'warped({perfil.nome},{dimensao},{carta})',
        dim=dimensao,
        metrica_fn=metrica,
        derivadas_fn=derivadas,
        segundas_derivadas_fn=segundas,
        dominio=dominio,
        bandeiras=bandeiras,
        oraculos=Oraculos(
            densidade_area=densidade if bandeiras.harmonica else None,
            curvatura_radial=perfil.curvatura_radial,
        ),
        origem=origem,
        parametros={'perfil': perfil.descrever(), 'dimensao': dimensao, 'carta': carta, 'raio_maximo': raio},
    )


def _bloco_diagonal(f1: FuncaoMetrica, f2: FuncaoMetrica, n1: int, n2: int, ordem: int):
    """Combina tensores por fator: componente não nula só com todos os índices no mesmo fator"""
    n = n1 + n2

    def combinado(x):
        parte1 = f1(x[..., :n1])
        parte2 = f2(x[..., n1:])
        resultado = np.zeros(x.shape[:-1] + (n,) * ordem)
        resultado[(Ellipsis,) + (slice(0, n1),) * ordem] = parte1
        resultado[(Ellipsis,) + (slice(n1, n),) * ordem] = parte2
        return resultado

    return combinado


def produto(m1: VariedadeCarta, m2: VariedadeCarta) -> VariedadeCarta:
    """Produto riemanniano M1 × M2 com métrica bloco-diagonal"""
    n1, n2 = m1.dim, m2.dim
    b1, b2 = m1.bandeiras, m2.bandeiras
    planos = b1.curvatura_constante == 0.0 and b2.curvatura_constante == 0.0
    bandeiras = Bandeiras(
        sem_pontos_focais=b1.sem_pontos_focais and b2.sem_pontos_focais,
        sem_pontos_conjugados=b1.sem_pontos_conjugados and b2.sem_pontos_conjugados,
        ricci_negativo=b1.ricci_negativo and b2.ricci_negativo,
        h_assintotico=0.0 if planos else None,
        curvatura_constante=0.0 if planos else None,
        harmonica=planos,
        # planos mistos entre fatores são planos: caudas 1/t em Busemann e no tensor estável
        cauda_algebrica=True,
    )

    def dominio_produto(x):
        return m1.no_dominio(x[..., :n1]) & m2.no_dominio(x[..., n1:])

    fatores = tuple(
        Fator(f.modelo, f.inicio + deslocamento, f.fim + deslocamento)
        for modelo, deslocamento in ((m1, 0), (m2, n1))
        for f in (modelo.fatores or (Fator(modelo, 0, modelo.dim),))
    )
    return _VariedadeProduto(
        nome=f'{m1.nome}x{m2.nome}',
        dim=n1 + n2,
        metrica_fn=_bloco_diagonal(m1.metrica, m2.metrica, n1, n2, 2),
        derivadas_fn=_bloco_diagonal(m1.derivadas_metrica, m2.derivadas_metrica, n1, n2, 3),
        segundas_derivadas_fn=_bloco_diagonal(m1.segundas_derivadas_metrica, m2.segundas_derivadas_metrica, n1, n2, 4),
        dominio=Dominio('produto'),
        bandeiras=bandeiras,
        oraculos=_oraculos_produto(m1, m2),
        origem=np.concatenate([m1.origem, m2.origem]),
        parametros={'fatores': [m1.descrever()['nome'], m2.descrever()['nome']]},
        fatores=fatores,
        contem_fn=dominio_produto,
    )


@dataclass(frozen=True, eq=False)
class _VariedadeProduto(VariedadeCarta):
    contem_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def no_dominio(self, x):
        return self.contem_fn(np.asarray(x, dtype=float))


def _oraculos_produto(m1: VariedadeCarta, m2: VariedadeCarta) -> Oraculos:
    n1 = m1.dim
    distancia = None
    if m1.oraculos.distancia and m2.oraculos.distancia:
        def distancia(p, q):
            d1 = m1.oraculos.distancia(np.asarray(p)[..., :n1], np.asarray(q)[..., :n1])
            d2 = m2.oraculos.distancia(np.asarray(p)[..., n1:], np.asarray(q)[..., n1:])
            return np.sqrt(d1 ** 2 + d2 ** 2)

    busemann = None
    if m1.oraculos.busemann and m2.oraculos.busemann:
        def busemann(v, x):
            # b_v = |v_1| b_{v_1/|v_1|} + |v_2| b_{v_2/|v_2|}
            v, x = np.asarray(v, dtype=float), np.asarray(x, dtype=float)
            total = 0.0
            for modelo, fatia in ((m1, slice(0, n1)), (m2, slice(n1, None))):
                componente = v[..., fatia]
                peso = modelo.norma(modelo.origem, componente)
                if np.all(peso <= 1e-15):
                    continue
                unitario = componente / np.where(peso > 1e-15, peso, 1.0)[..., None]
                total = total + np.where(peso > 1e-15, peso * modelo.oraculos.busemann(unitario, x[..., fatia]), 0.0)
            return total

    return Oraculos(distancia=distancia, busemann=busemann)
