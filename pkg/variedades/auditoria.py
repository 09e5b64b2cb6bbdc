"""
Auditoria do sinal das curvaturas radiais a partir de um ponto.

Percorre geodésicas radiais amostradas e avalia <R(γ', w) γ', w> para w
transversal no referencial paralelo; o maior autovalor da matriz de
curvatura é a pior testemunha.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from core.configuracao import parametro
from core.numerica import direcoes_esfera

from .geometria import base_ortonormal, conexao_e_curvatura, matriz_curvatura, referencial_ortonormal
from .modelos import VariedadeCarta

logger = logging.getLogger('laboratorio.variedades')

TOLERANCIA_SINAL = 1e-9


@dataclass
class AuditoriaRadial:
    """Veredito 'nonpositive' ou 'violated' com a pior testemunha (t, v, w)"""

    nao_positiva: bool
    pior_valor: float
    tempo: Optional[float]
    direcao: Optional[np.ndarray]
    transversal: Optional[np.ndarray]
    hipotese_polo: bool
    geodesicas: int
    truncadas: int
    t_max: float

    @property
    def veredito(self) -> str:
        return 'nonpositive' if self.nao_positiva else 'violated'

    def como_dict(self) -> Dict:
        return {
            'veredito': self.veredito,
            'pior_valor': self.pior_valor,
            'tempo': self.tempo,
            'direcao': self.direcao,
            'transversal': self.transversal,
            'hipotese_polo': self.hipotese_polo,
            'geodesicas': self.geodesicas,
            'truncadas': self.truncadas,
            't_max': self.t_max,
        }


def auditar_curvatura_radial(m: VariedadeCarta, p=None, amostras: int = 16, t_max: float = 5.0,
                             passo: float = None, registros: int = 200, semente: int = 0) -> AuditoriaRadial:
    """
    Sinal das curvaturas radiais em relação a p ao longo de ``amostras``
    geodésicas até ``t_max``. Não lança erro: a ausência de polo é apenas
    registrada em ``hipotese_polo``.
    """
    from geodesicas.integrador import integrar_fluxo

    p = m.exigir_dominio(m.origem if p is None else p)
    passo = passo or parametro('PASSO_INTEGRACAO')
    n_passos = max(1, int(np.ceil(t_max / passo - 1e-9)))
    g = m.metrica(p)
    direcoes = np.einsum('ij,kj->ki', base_ortonormal(g), direcoes_esfera(m.dim, amostras, semente))
    pontos = np.broadcast_to(p, direcoes.shape).copy()
    trajetoria = integrar_fluxo(
        m, pontos, direcoes, t_max / n_passos, n_passos,
        registrar_cada=max(1, n_passos // registros),
        referencial=referencial_ortonormal(m.metrica(pontos), direcoes),
    )

    validos = np.all(np.isfinite(trajetoria.x), axis=-1)
    x = np.where(validos[..., None], trajetoria.x, p)
    u = np.where(validos[..., None], trajetoria.u, direcoes[:, None, :])
    referencial = np.where(validos[..., None, None], trajetoria.referencial, trajetoria.referencial[:, :1])
    _, _, rlow = conexao_e_curvatura(m, x)
    curvatura = matriz_curvatura(rlow, referencial, u)
    autovalores, autovetores = np.linalg.eigh(0.5 * (curvatura + np.swapaxes(curvatura, -1, -2)))
    maiores = np.where(validos, autovalores[..., -1], -np.inf)
    linha, registro = np.unravel_index(int(np.argmax(maiores)), maiores.shape)
    pior = float(maiores[linha, registro])
    nao_positiva = pior <= TOLERANCIA_SINAL

    auditoria = AuditoriaRadial(
        nao_positiva=nao_positiva,
        pior_valor=pior,
        tempo=None if nao_positiva else float(trajetoria.tempos[linha, registro]),
        direcao=None if nao_positiva else direcoes[linha],
        transversal=None if nao_positiva else referencial[linha, registro] @ autovetores[linha, registro, :, -1],
        hipotese_polo=m.bandeiras.sem_pontos_conjugados,
        geodesicas=amostras,
        truncadas=int(np.sum(trajetoria.saiu)),
        t_max=float(t_max),
    )
    logger.info(
        f"Auditoria radial | Modelo: {m.nome} | Veredito: {auditoria.veredito} | Pior: {pior:.3e}",
        extra={'modelo': m.nome, 'veredito': auditoria.veredito, 'pior_valor': pior},
    )
    return auditoria
