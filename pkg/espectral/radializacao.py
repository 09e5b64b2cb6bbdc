"""
Radialização em torno de o: R_o f(r) é a média de f sobre a esfera geodésica
de raio r ponderada pela densidade de área. Em variedades harmônicas R_o
comuta com o laplaciano.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np
from scipy import interpolate

from core.excecoes import ErroPrecondicao
from core.numerica import derivada_cinco_pontos, segunda_derivada_cinco_pontos
from espectral.services import PerfilRadial, perfil_radial
from geodesicas import services as geodesicas
from variedades.geometria import laplaciano_diferencas
from variedades.modelos import VariedadeCarta

logger = logging.getLogger('laboratorio.espectral')


@dataclass
class PerfilRadializado:
    origem: np.ndarray
    r: np.ndarray
    valores: np.ndarray

    def avaliar(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        folga = 1e-6 * max(1.0, float(self.r[-1]))
        if np.any(r < -folga) or np.any(r > self.r[-1] + folga):
            raise ErroPrecondicao('Raio fora do perfil radializado', r_max=float(self.r[-1]))
        return interpolate.CubicSpline(self.r, self.valores)(np.clip(r, 0.0, self.r[-1]))

    def como_funcao(self, m: VariedadeCarta) -> Callable[[np.ndarray], np.ndarray]:
        """x ↦ R_o f(d(o, x)); sem oráculo a distância vem do tiro geodésico"""
        oraculo = m.oraculos.distancia

        def funcao(x):
            x = np.asarray(x, dtype=float)
            if oraculo is not None:
                return self.avaliar(oraculo(self.origem, x))
            pontos = np.atleast_2d(x)
            distancias = np.array([geodesicas.distancia(m, self.origem, ponto) for ponto in pontos])
            return self.avaliar(distancias if x.ndim > 1 else distancias[0])

        return funcao


def _valores_nos_nos(perfil: PerfilRadial, f: Callable) -> np.ndarray:
    quantidade, passos, n = perfil.pontos.shape
    valores = np.asarray(f(perfil.pontos.reshape(-1, n)), dtype=float)
    if valores.shape != (quantidade * passos,):
        raise ErroPrecondicao('A função deve ser vetorizada: (N, n) -> (N,)', forma=valores.shape)
    return valores.reshape(quantidade, passos)


def _media_esferica(perfil: PerfilRadial, valores: np.ndarray) -> np.ndarray:
    """Σ w det v / Σ w det por raio; em r = 0 vale v(o)"""
    pesos = perfil.pesos[:, None] * perfil.determinantes
    with np.errstate(invalid='ignore', divide='ignore'):
        medias = np.sum(pesos * valores, axis=0) / np.sum(pesos, axis=0)
    medias[0] = valores[0, 0]
    return medias


def radializar(m: VariedadeCarta, o, f: Callable, raio: float, ordem: int = None, passo: float = None,
               perfil: PerfilRadial = None) -> PerfilRadializado:
    perfil = perfil or perfil_radial(m, o, raio, passo, ordem)
    valores = _media_esferica(perfil, _valores_nos_nos(perfil, f))
    return PerfilRadializado(origem=perfil.origem, r=perfil.r, valores=valores)


@dataclass
class ResultadoComutacao:
    """R_o(Δf) contra Δ(R_o f) = g'' + g'·Δd_o nos nós de verificação"""

    r: np.ndarray
    radializado_do_laplaciano: np.ndarray
    laplaciano_do_radializado: np.ndarray

    @property
    def residuo(self) -> float:
        return float(np.max(np.abs(self.laplaciano_do_radializado - self.radializado_do_laplaciano[None, :])))

    def como_dict(self) -> Dict:
        return {
            'r': self.r,
            'radializado_do_laplaciano': self.radializado_do_laplaciano,
            'residuo': self.residuo,
        }


def residuo_comutacao(m: VariedadeCarta, o, f: Callable, raio: float, laplaciano: Optional[Callable] = None,
                      ordem: int = None, passo: float = None, passo_laplaciano: float = 2e-3,
                      raio_minimo: float = 0.2, verificacoes: int = 8,
                      perfil: PerfilRadial = None) -> ResultadoComutacao:
    """
    Resíduo sup |R_o(Δf) - Δ(R_o f)| sobre os nós de verificação.

    Δ(R_o f) no nó (k, r) é g''(r) + g'(r)·Δd_o(x_k(r)), com g', g'' por
    diferenças de quarta ordem no perfil uniforme; Δf vem de ``laplaciano``
    quando dado e, senão, do laplaciano covariante por diferenças.
    """
    perfil = perfil or perfil_radial(m, o, raio, passo, ordem)
    valores = _valores_nos_nos(perfil, f)
    g = _media_esferica(perfil, valores)
    g_linha = derivada_cinco_pontos(g, perfil.passo)
    g_duas = segunda_derivada_cinco_pontos(g, perfil.passo)

    candidatos = np.flatnonzero((perfil.r >= raio_minimo) & np.isfinite(g_duas))
    if candidatos.size == 0:
        raise ErroPrecondicao('Nenhum raio de verificação no perfil', raio_minimo=raio_minimo)
    indices = np.unique(candidatos[np.round(np.linspace(0, candidatos.size - 1, verificacoes)).astype(int)])

    pontos = perfil.pontos[:, indices]
    if laplaciano is not None:
        n = m.dim
        laplacianos = np.asarray(laplaciano(pontos.reshape(-1, n)), dtype=float).reshape(pontos.shape[:2])
    else:
        def escalar(x):
            return float(f(x[None])[0])
        laplacianos = np.array([
            [laplaciano_diferencas(m, escalar, x, passo_laplaciano) for x in linha] for linha in pontos
        ])

    pesos = perfil.pesos[:, None] * perfil.determinantes[:, indices]
    radializado = np.sum(pesos * laplacianos, axis=0) / np.sum(pesos, axis=0)
    do_radializado = g_duas[indices][None, :] + g_linha[indices][None, :] * perfil.curvaturas[:, indices]

    resultado = ResultadoComutacao(
        r=perfil.r[indices],
        radializado_do_laplaciano=radializado,
        laplaciano_do_radializado=do_radializado,
    )
    logger.info(
        f"Comutação radial | Modelo: {m.nome} | Resíduo: {resultado.residuo:.3e}",
        extra={'modelo': m.nome, 'residuo': resultado.residuo, 'verificacoes': int(indices.size)},
    )
    return resultado


def funcao_suporte_compacto(m: VariedadeCarta, centro, raio: float) -> Callable[[np.ndarray], np.ndarray]:
    """exp(1 - 1/(1 - s²)) com s = d(centro, x)/raio; zero fora da bola"""
    distancia = m.oraculos.distancia
    if distancia is None:
        raise ErroPrecondicao(f'Função de suporte compacto exige oráculo de distância: {m.nome}')
    centro = m.exigir_dominio(centro)

    def funcao(x):
        s = np.asarray(distancia(centro, x), dtype=float) / raio
        dentro = s < 1.0
        seguro = np.where(dentro, s, 0.0)
        return np.where(dentro, np.exp(1.0 - 1.0 / (1.0 - seguro ** 2)), 0.0)

    return funcao
