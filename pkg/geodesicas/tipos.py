"""
Tipos de domínio do app de geodésicas: caminho discretizado, campos e tensores
de Jacobi, resultado do tensor estável e vereditos de pontos focais.

Matrizes de Jacobi são expressas no referencial paralelo E(t) de γ'⊥.
"""

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from core.numerica import norma_operador, segunda_derivada_cinco_pontos
from core.relatorios import escrever_csv
from variedades.geometria import conexao_e_curvatura, matriz_curvatura
from variedades.modelos import VariedadeCarta

from .integrador import separar_fundamental


@dataclass(eq=False)
class CaminhoGeodesico:
    """
    Geodésica de velocidade unitária com referencial paralelo e o par
    fundamental (A, B) do tensor de Jacobi: A(0) = Id, A'(0) = 0,
    B(0) = 0, B'(0) = Id.
    """

    modelo: VariedadeCarta
    tempos: np.ndarray
    pontos: np.ndarray
    velocidades: np.ndarray
    referencial: np.ndarray
    y: np.ndarray
    y_linha: np.ndarray
    passo: float
    truncado: bool = False
    tempo_saida: Optional[float] = None
    erro_estimado: Optional[float] = None

    @property
    def comprimento(self) -> float:
        return float(self.tempos[-1])

    @property
    def nos(self) -> int:
        return self.tempos.size

    @property
    def fundamental(self):
        """(A, A', B, B') por nó"""
        return separar_fundamental(self.y, self.y_linha)

    @cached_property
    def matrizes_curvatura(self) -> np.ndarray:
        """M(t) = <R(e_i, γ') γ', e_j> em cada nó"""
        _, _, rlow = conexao_e_curvatura(self.modelo, self.pontos)
        return matriz_curvatura(rlow, self.referencial, self.velocidades)

    def indice_tempo(self, t: float, tolerancia: float = 1e-9) -> Optional[int]:
        """Índice do nó em ``t`` ou None se ``t`` não for nó da malha"""
        indice = int(np.argmin(np.abs(self.tempos - t)))
        if abs(self.tempos[indice] - t) <= tolerancia * max(1.0, abs(t)):
            return indice
        return None

    def desvio_velocidade_unitaria(self) -> float:
        return float(np.max(np.abs(self.modelo.produto_interno(self.pontos, self.velocidades, self.velocidades) - 1.0)))

    def desvio_referencial(self) -> float:
        """Maior desvio de [γ' | E] em relação a uma base ortonormal"""
        completo = np.concatenate([self.velocidades[..., :, None], self.referencial], axis=-1)
        gram = np.einsum('tai,tab,tbj->tij', completo, self.modelo.metrica(self.pontos), completo)
        return float(np.max(np.abs(gram - np.eye(gram.shape[-1]))))

    def residuo_geodesico(self) -> float:
        """max |∇_{γ'} γ'| por diferenças de quinta ordem de γ' nos nós interiores"""
        if self.nos < 5:
            return 0.0
        u = self.velocidades
        derivada = (-u[4:] + 8.0 * u[3:-1] - 8.0 * u[1:-3] + u[:-4]) / (12.0 * self.passo)
        _, gamma, _ = conexao_e_curvatura(self.modelo, self.pontos[2:-2])
        aceleracao = derivada + np.einsum('tkij,ti,tj->tk', gamma, u[2:-2], u[2:-2])
        return float(np.max(self.modelo.norma(self.pontos[2:-2], aceleracao)))

    def exportar_csv(self, caminho: Path) -> Path:
        """Uma linha por nó: t, coordenadas, velocidade, referencial e [A | B] (linha a linha)"""
        n = self.modelo.dim
        cabecalho = (
            ['t']
            + [f'x{i}' for i in range(n)]
            + [f'u{i}' for i in range(n)]
            + [f'e{i}{j}' for i in range(n) for j in range(n - 1)]
            + [f'y{i}{j}' for i in range(n - 1) for j in range(2 * (n - 1))]
        )
        linhas = (
            [t, *x, *u, *e.reshape(-1), *y.reshape(-1)]
            for t, x, u, e, y in zip(self.tempos, self.pontos, self.velocidades, self.referencial, self.y)
        )
        return escrever_csv(caminho, cabecalho, linhas)


@dataclass(eq=False)
class CampoJacobi:
    """Campo de Jacobi vetorial no referencial paralelo"""

    caminho: CaminhoGeodesico
    valores: np.ndarray
    derivadas: np.ndarray

    @property
    def tempos(self) -> np.ndarray:
        return self.caminho.tempos

    def residuo(self) -> float:
        """max |Y'' + M Y| / max(1, |Y|) nos nós interiores (diferenças de cinco pontos)"""
        segunda = segunda_derivada_cinco_pontos(self.valores, self.caminho.passo)[2:-2]
        if segunda.size == 0:
            return 0.0
        termo = np.einsum('tij,tj->ti', self.caminho.matrizes_curvatura[2:-2], self.valores[2:-2])
        escala = np.maximum(1.0, np.linalg.norm(self.valores[2:-2], axis=-1))
        return float(np.max(np.linalg.norm(segunda + termo, axis=-1) / escala))

    def em_coordenadas(self) -> np.ndarray:
        """Y(t) como vetor coordenado E(t) Y(t)"""
        return np.einsum('tic,tc->ti', self.caminho.referencial, self.valores)


@dataclass(eq=False)
class CampoTensorJacobi:
    """Tensor de Jacobi D(t) nos nós [0, s] do caminho"""

    caminho: CaminhoGeodesico
    valores: np.ndarray
    derivadas: np.ndarray
    s: float

    @property
    def tempos(self) -> np.ndarray:
        return self.caminho.tempos[: self.valores.shape[0]]

    def wronskiano(self) -> np.ndarray:
        """W(t) = Dᵀ D' - D'ᵀ D por nó"""
        return wronskiano(self.valores, self.derivadas, self.valores, self.derivadas)

    def desvio_wronskiano(self) -> float:
        w = self.wronskiano()
        return float(np.max(np.abs(w - w[0])))

    def norma_final(self) -> float:
        return float(norma_operador(self.valores[-1]))


def wronskiano(y: np.ndarray, y_linha: np.ndarray, z: np.ndarray, z_linha: np.ndarray) -> np.ndarray:
    """Yᵀ Z' - Y'ᵀ Z (vetores ou matrizes no referencial) por nó"""
    if y.ndim == 2:
        return np.einsum('ti,ti->t', y, z_linha) - np.einsum('ti,ti->t', y_linha, z)
    return (
        np.einsum('tji,tjk->tik', y, z_linha)
        - np.einsum('tji,tjk->tik', y_linha, z)
    )


@dataclass
class ResultadoTensorEstavel:
    """D_v(0) = Id e D'_v(0) como limite de D'_{s,v}(0) na agenda de s"""

    base: np.ndarray
    direcao: np.ndarray
    referencial: np.ndarray
    d0: np.ndarray
    d0_linha: np.ndarray
    agenda: List[float]
    lacuna: float
    lacunas: List[float]
    convergiu: bool
    extrapolacao: str
    assimetria: float
    lacunas_monotonas: bool
    norma_monotona: Optional[bool] = None
    folga_norma: Optional[float] = None
    diagnosticos: Dict = field(default_factory=dict)

    @property
    def espectro(self) -> np.ndarray:
        return np.linalg.eigvalsh(0.5 * (self.d0_linha + self.d0_linha.T))

    def no_sanduiche(self, curvatura_maxima: float, folga: float = 1e-3) -> bool:
        """Espectro em [-sqrt(sup|K|), 0] dentro da folga"""
        espectro = self.espectro
        return bool(np.all(espectro <= folga) and np.all(espectro >= -np.sqrt(curvatura_maxima) - folga))

    def em_coordenadas(self) -> np.ndarray:
        """Forma bilinear coordenada g E D' Eᵀ g do operador D'(0)"""
        g = self.diagnosticos.get('metrica')
        if g is None:
            raise ValueError('Métrica da base não registrada')
        return g @ self.referencial @ self.d0_linha @ self.referencial.T @ g

    def como_dict(self) -> Dict:
        return {
            'd0_linha': self.d0_linha,
            'agenda': self.agenda,
            'lacuna': self.lacuna,
            'lacunas': self.lacunas,
            'convergiu': self.convergiu,
            'extrapolacao': self.extrapolacao,
            'assimetria': self.assimetria,
            'lacunas_monotonas': self.lacunas_monotonas,
            'norma_monotona': self.norma_monotona,
        }


@dataclass
class VereditoFocal:
    """Crescimento estrito de |Y(t)|² para t > 0"""

    estritamente_crescente: bool
    tempo_violacao: Optional[float] = None
    derivada_violacao: Optional[float] = None

    @property
    def rotulo(self) -> str:
        return 'strictly_increasing' if self.estritamente_crescente else 'violated'

    def como_dict(self) -> Dict:
        return {
            'veredito': self.rotulo,
            'tempo_violacao': self.tempo_violacao,
            'derivada_violacao': self.derivada_violacao,
        }


def exportar_tensor_csv(campo: CampoTensorJacobi, caminho: Path) -> Path:
    """Uma linha por nó: t, coordenadas, D(t) e D'(t) (linha a linha)"""
    n = campo.caminho.modelo.dim
    k = n - 1
    cabecalho = (
        ['t']
        + [f'x{i}' for i in range(n)]
        + [f'd{i}{j}' for i in range(k) for j in range(k)]
        + [f'dl{i}{j}' for i in range(k) for j in range(k)]
    )
    linhas = (
        [t, *x, *d.reshape(-1), *dl.reshape(-1)]
        for t, x, d, dl in zip(campo.tempos, campo.caminho.pontos, campo.valores, campo.derivadas)
    )
    return escrever_csv(caminho, cabecalho, linhas)
