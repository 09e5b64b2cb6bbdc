"""
Verificações de posto superior em produtos de fatores de curvatura constante
não positiva: Δb_v = ⟨v, 2ρ⟩, ‖ρ‖² ≤ λ₀ e |ΔF| ≤ ‖2ρ‖.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np

from core.excecoes import ErroModeloNaoSuportado, ErroPrecondicao
from core.numerica import direcoes_baixa_discrepancia, direcoes_esfera
from convexidade.busemann import RaiosAssintoticos
from espectral.services import (
    ResultadoRayleigh, curvatura_media_horosfera, curvaturas_no_ponto, quociente_rayleigh_lambda0,
)
from geodesicas.integrador import FluxoSegmentado
from variedades.geometria import base_ortonormal
from variedades.modelos import VariedadeCarta

logger = logging.getLogger('laboratorio.espectral')

FOLGA_LAPLACIANO_BUSEMANN = 1e-3
FOLGA_CAUCHY_SCHWARZ = 1e-9
FOLGA_LAMBDA0 = 0.05


def _exigir_produto_simetrico(m: VariedadeCarta):
    if not m.fatores:
        raise ErroModeloNaoSuportado(f'Verificações de posto superior exigem um produto: {m.nome}', modelo=m.nome)
    for fator in m.fatores:
        curvatura = fator.modelo.bandeiras.curvatura_constante
        if curvatura is None or curvatura > 0.0 or fator.modelo.bandeiras.h_assintotico is None:
            raise ErroModeloNaoSuportado(
                f'Fator {fator.modelo.nome} não é de curvatura constante não positiva', modelo=m.nome,
            )


@dataclass
class DadosRaizes:
    """2ρ tem componente h_i no fator i; ‖ρ‖ = ½ √Σ h_i²"""

    curvaturas_fatores: np.ndarray

    @property
    def norma_rho(self) -> float:
        return 0.5 * float(np.linalg.norm(self.curvaturas_fatores))

    def produto_com(self, normas_fatores: np.ndarray) -> np.ndarray:
        """⟨v, 2ρ⟩ = Σ |v_i| h_i para v na câmara de Weyl positiva"""
        return np.asarray(normas_fatores) @ self.curvaturas_fatores

    def pesos_maximizadores(self) -> np.ndarray:
        norma = np.linalg.norm(self.curvaturas_fatores)
        if norma == 0.0:
            return np.full(self.curvaturas_fatores.shape, 1.0 / np.sqrt(self.curvaturas_fatores.size))
        return self.curvaturas_fatores / norma

    def desvio_cauchy_schwarz(self) -> float:
        """|sup_v ⟨v, 2ρ⟩ - ‖2ρ‖|, atingido em v ∝ 2ρ"""
        return abs(float(self.produto_com(self.pesos_maximizadores())) - 2.0 * self.norma_rho)


def dados_raizes(m: VariedadeCarta) -> DadosRaizes:
    _exigir_produto_simetrico(m)
    return DadosRaizes(np.array([float(fator.modelo.bandeiras.h_assintotico) for fator in m.fatores]))


def normas_por_fator(m: VariedadeCarta, v: np.ndarray) -> np.ndarray:
    v = np.atleast_2d(v)
    return np.stack([
        fator.modelo.norma(np.broadcast_to(m.origem[fator.inicio:fator.fim], v[:, fator.inicio:fator.fim].shape),
                           v[:, fator.inicio:fator.fim])
        for fator in m.fatores
    ], axis=-1)


def direcoes_com_pesos(m: VariedadeCarta, pesos: np.ndarray, semente: int = 0) -> np.ndarray:
    """Vetores unitários na origem com norma pesos[:, i] no fator i"""
    pesos = np.atleast_2d(np.asarray(pesos, dtype=float))
    quantidade = pesos.shape[0]
    direcoes = np.zeros((quantidade, m.dim))
    for i, fator in enumerate(m.fatores):
        d = fator.fim - fator.inicio
        locais = np.ones((quantidade, 1)) if d == 1 else direcoes_esfera(d, quantidade, semente + i)
        base = base_ortonormal(fator.modelo.metrica(m.origem[fator.inicio:fator.fim]))
        direcoes[:, fator.inicio:fator.fim] = pesos[:, i:i + 1] * (locais @ base.T)
    return direcoes


def direcoes_produto(m: VariedadeCarta, quantidade: int, angulo_minimo: float = 0.2, semente: int = 0) -> np.ndarray:
    """
    Grade de direções com toda componente de fator de norma ≥ sin(angulo_minimo).
    Componentes pequenas convergem devagar na extrapolação de Busemann.
    """
    _exigir_produto_simetrico(m)
    fatores = len(m.fatores)
    if fatores == 2:
        angulos = np.linspace(angulo_minimo, np.pi / 2.0 - angulo_minimo, quantidade)
        pesos = np.stack([np.cos(angulos), np.sin(angulos)], axis=-1)
    else:
        candidatos = np.abs(direcoes_baixa_discrepancia(fatores, 16 * quantidade, semente))
        candidatos = candidatos[np.min(candidatos, axis=1) >= np.sin(angulo_minimo)]
        if candidatos.shape[0] < quantidade:
            raise ErroPrecondicao('Ângulo mínimo grande demais para a quantidade de direções',
                                  angulo_minimo=angulo_minimo)
        pesos = candidatos[:quantidade]
    return direcoes_com_pesos(m, pesos, semente)


@dataclass
class ResultadoPostoSuperior:
    modelo: str
    dados: DadosRaizes
    direcoes: np.ndarray
    medidos: np.ndarray
    esperados: np.ndarray
    maximo_medido: float
    variacoes_geodesicas: np.ndarray
    rayleigh: ResultadoRayleigh
    falhas: Dict = field(default_factory=dict)

    @property
    def desvio_maximo(self) -> float:
        validos = np.isfinite(self.medidos)
        return float(np.max(np.abs(self.medidos[validos] - self.esperados[validos]))) if np.any(validos) else np.inf

    @property
    def norma_rho_quadrado_medida(self) -> float:
        return (self.maximo_medido / 2.0) ** 2

    @property
    def laplaciano_F(self) -> float:
        """ΔF para a medida uniforme sobre a grade de direções"""
        return float(np.nanmean(self.medidos))

    @property
    def vereditos(self) -> Dict[str, bool]:
        rho2 = self.norma_rho_quadrado_medida
        return {
            'laplaciano_busemann': self.desvio_maximo <= FOLGA_LAPLACIANO_BUSEMANN and not self.falhas,
            'cauchy_schwarz': self.dados.desvio_cauchy_schwarz() <= FOLGA_CAUCHY_SCHWARZ,
            'rho_lambda0': rho2 <= self.rayleigh.valor * (1.0 + FOLGA_LAMBDA0),
            'laplaciano_F': abs(self.laplaciano_F) <= 2.0 * self.dados.norma_rho + FOLGA_LAPLACIANO_BUSEMANN,
            'constante_geodesicas': bool(np.all(self.variacoes_geodesicas <= FOLGA_LAPLACIANO_BUSEMANN)),
        }

    @property
    def aprovado(self) -> bool:
        return all(self.vereditos.values())

    def como_dict(self) -> Dict:
        return {
            'modelo': self.modelo,
            'curvaturas_fatores': self.dados.curvaturas_fatores,
            'norma_rho': self.dados.norma_rho,
            'norma_rho_quadrado_medida': self.norma_rho_quadrado_medida,
            'medidos': self.medidos,
            'esperados': self.esperados,
            'desvio_maximo': self.desvio_maximo,
            'laplaciano_F': self.laplaciano_F,
            'variacoes_geodesicas': self.variacoes_geodesicas,
            'rayleigh': self.rayleigh.como_dict(),
            'vereditos': self.vereditos,
            'aprovado': self.aprovado,
            'falhas': {str(linha): erro.como_dict() for linha, erro in self.falhas.items()},
        }


def verificacoes_posto_superior(m: VariedadeCarta, direcoes=8, agenda: Sequence[float] = None,
                                agenda_estavel: Sequence[float] = None, tolerancia: float = None,
                                passo: float = None, tempos_geodesica: Sequence[float] = (1.0, 2.0),
                                direcoes_variacao: int = 2, n_indice: int = 10, raio: float = 8.0,
                                ordem: int = 4, passo_radial: float = None) -> ResultadoPostoSuperior:
    """
    Δb_v(o) medido contra Σ|v_i|h_i na grade (acrescida da direção v ∝ 2ρ),
    constância de Δb_v ao longo de γ_v e o quociente de Rayleigh com h = ‖2ρ‖.
    ``direcoes`` é uma quantidade (grade de direcoes_produto) ou um array.
    """
    dados = dados_raizes(m)
    if np.isscalar(direcoes):
        direcoes = direcoes_produto(m, int(direcoes))
    direcoes = np.atleast_2d(np.asarray(direcoes, dtype=float))
    maximizadora = direcoes_com_pesos(m, dados.pesos_maximizadores())
    todas = np.concatenate([direcoes, maximizadora])

    raios = RaiosAssintoticos(m, todas, agenda, passo)
    medidos, _, falhas = curvaturas_no_ponto(m, raios, m.origem, agenda_estavel, tolerancia, None, passo)
    esperados = dados.produto_com(normas_por_fator(m, todas))

    variacoes: List[float] = []
    for indice, v in enumerate(direcoes[:direcoes_variacao]):
        fluxo = FluxoSegmentado(m, m.origem[None], v[None], passo=passo)
        valores = []
        for t in tempos_geodesica:
            fluxo.avancar_ate(t)
            valores.append(curvatura_media_horosfera(
                m, v, fluxo.x[0], agenda, agenda_estavel, tolerancia, passo=passo,
            ).h)
        variacoes.append(float(np.ptp(np.concatenate([[medidos[indice]], valores]))))

    rayleigh = quociente_rayleigh_lambda0(
        m, n_indice=n_indice, h=2.0 * dados.norma_rho, raio=raio, passo=passo_radial, ordem=ordem,
    )
    resultado = ResultadoPostoSuperior(
        modelo=m.nome,
        dados=dados,
        direcoes=direcoes,
        medidos=medidos[:-1],
        esperados=esperados[:-1],
        maximo_medido=float(np.nanmax(medidos)),
        variacoes_geodesicas=np.array(variacoes),
        rayleigh=rayleigh,
        falhas=falhas,
    )
    logger.info(
        f"Posto superior | Modelo: {m.nome} | ‖ρ‖²: {dados.norma_rho ** 2:.6g} | "
        f"Desvio Δb: {resultado.desvio_maximo:.3e} | Aprovado: {resultado.aprovado}",
        extra={'modelo': m.nome, 'desvio': resultado.desvio_maximo, 'aprovado': resultado.aprovado},
    )
    return resultado
