"""
Certificados de convexidade estrita por amostragem.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from core.configuracao import parametro
from core.excecoes import ErroDominio, ErroLaboratorio, ErroPrecondicao
from core.numerica import pesos_diadicos, vetores_bola_baixa_discrepancia
from core.paralelo import mapa_ordenado
from core.relatorios import escrever_csv
from geodesicas.integrador import integrar_fluxo
from variedades.geometria import autovalores_metricos, base_ortonormal
from variedades.modelos import VariedadeCarta

from .busemann import MedidaFronteira, RaiosAssintoticos, funcao_media_F
from .services import funcao_exaustao, hessiano_distancia_quadrado

logger = logging.getLogger('laboratorio.convexidade')

FUNCOES = ('exhaustion_f', 'averaged_F', 'distance_sq')


def amostrar_pontos_bola(m: VariedadeCarta, raio: float, quantidade: int, centro=None, semente: int = 0,
                         passo: float = None) -> np.ndarray:
    """Pontos de baixa discrepância na bola métrica B(centro, raio), empurrados por exp_centro"""
    centro = m.exigir_dominio(m.origem if centro is None else centro)
    base = base_ortonormal(m.metrica(centro))
    vetores = vetores_bola_baixa_discrepancia(m.dim, quantidade, raio, semente) @ base.T
    comprimentos = m.norma(np.broadcast_to(centro, vetores.shape), vetores)
    n_passos = max(1, int(np.ceil(raio / (passo or parametro('PASSO_INTEGRACAO')))))
    trajetoria = integrar_fluxo(
        m, np.broadcast_to(centro, vetores.shape), vetores / comprimentos[:, None],
        comprimentos / n_passos, n_passos, registrar_cada=n_passos,
    )
    if np.any(trajetoria.saiu):
        raise ErroDominio(f'Bola de raio {raio} deixa a carta de {m.nome}', amostras=int(trajetoria.saiu.sum()))
    return trajetoria.x[:, -1]


@dataclass
class CertificadoConvexidade:
    funcao: str
    pontos: np.ndarray
    autovalores_minimos: np.ndarray
    normas_gradiente: np.ndarray
    margem: float
    falhas: Dict[int, ErroLaboratorio] = field(default_factory=dict)
    comparacao_medidas: Optional[Dict] = None

    @property
    def autovalor_minimo(self) -> float:
        return float(np.nanmin(self.autovalores_minimos)) if np.any(np.isfinite(self.autovalores_minimos)) else np.nan

    @property
    def pior_ponto(self) -> Optional[np.ndarray]:
        if not np.any(np.isfinite(self.autovalores_minimos)):
            return None
        return self.pontos[int(np.nanargmin(self.autovalores_minimos))]

    @property
    def limite_gradiente(self) -> float:
        return float(np.nanmax(self.normas_gradiente))

    @property
    def estrito(self) -> bool:
        return not self.falhas and bool(np.all(self.autovalores_minimos > self.margem))

    def como_dict(self) -> Dict:
        return {
            'funcao': self.funcao,
            'estrito': self.estrito,
            'amostras': int(self.pontos.shape[0]),
            'margem': self.margem,
            'autovalor_minimo': self.autovalor_minimo,
            'pior_ponto': self.pior_ponto,
            'limite_gradiente': self.limite_gradiente,
            'falhas': {indice: erro.como_dict() for indice, erro in self.falhas.items()},
            'comparacao_medidas': self.comparacao_medidas,
        }

    def exportar_csv(self, caminho: Path) -> Path:
        n = self.pontos.shape[1]
        cabecalho = [f'x{i}' for i in range(n)] + ['autovalor_minimo', 'norma_gradiente']
        linhas = (
            [*ponto, autovalor, norma]
            for ponto, autovalor, norma in zip(self.pontos, self.autovalores_minimos, self.normas_gradiente)
        )
        return escrever_csv(caminho, cabecalho, linhas)


def certificar_convexidade_estrita(m: VariedadeCarta, funcao: str, pontos: np.ndarray, margem: float = 1e-3,
                                   base=None, medida: MedidaFronteira = None, threads: int = None,
                                   comparar_medidas: bool = False, agenda=None,
                                   agenda_estavel=None) -> CertificadoConvexidade:
    """
    Autovalor mínimo (relativo à métrica) do hessiano de ``funcao`` em cada
    amostra. 'exhaustion_f' e 'distance_sq' usam ``base`` (origem por padrão);
    'averaged_F' usa ``medida``. Com ``comparar_medidas`` os mesmos hessianos
    por direção são repesados com pesos diádicos e uniformes.
    """
    if funcao not in FUNCOES:
        raise ErroPrecondicao(f'Função desconhecida para certificado: {funcao}', opcoes=list(FUNCOES))
    pontos = np.atleast_2d(np.asarray(pontos, dtype=float))
    base = m.origem if base is None else np.asarray(base, dtype=float)
    if funcao == 'averaged_F' and medida is None:
        raise ErroPrecondicao('averaged_F exige uma medida de fronteira')
    raios = RaiosAssintoticos(m, medida.direcoes, agenda) if funcao == 'averaged_F' else None

    def avaliar(indice: int):
        ponto = pontos[indice]
        try:
            if funcao == 'exhaustion_f':
                valor = funcao_exaustao(m, base, ponto)
                return valor.autovalor_minimo, valor.norma_gradiente, None
            if funcao == 'distance_sq':
                hessiano = hessiano_distancia_quadrado(m, base, ponto)
                return float(autovalores_metricos(hessiano, m.metrica(ponto))[0]), np.nan, None
            valor = funcao_media_F(m, medida, ponto, agenda_estavel=agenda_estavel, raios=raios)
            extra = None
            if comparar_medidas:
                quantidade = medida.tamanho
                extra = {
                    'uniforme': valor.reponderar(np.full(quantidade, 1.0 / quantidade)).autovalor_minimo,
                    'diadica': valor.reponderar(pesos_diadicos(quantidade)).autovalor_minimo,
                }
            return valor.autovalor_minimo, valor.norma_gradiente, extra
        except ErroLaboratorio as erro:
            return erro

    resultados = mapa_ordenado(avaliar, list(range(pontos.shape[0])), threads)
    autovalores = np.full(pontos.shape[0], np.nan)
    normas = np.full(pontos.shape[0], np.nan)
    falhas: Dict[int, ErroLaboratorio] = {}
    comparacoes: List[Dict] = []
    for indice, resultado in enumerate(resultados):
        if isinstance(resultado, ErroLaboratorio):
            falhas[indice] = resultado
            continue
        autovalores[indice], normas[indice], extra = resultado
        if extra is not None:
            comparacoes.append(extra)

    comparacao = None
    if comparacoes:
        comparacao = {
            nome: {
                'autovalor_minimo': float(min(item[nome] for item in comparacoes)),
                'estrito': bool(all(item[nome] > margem for item in comparacoes)),
            }
            for nome in ('uniforme', 'diadica')
        }
    certificado = CertificadoConvexidade(
        funcao=funcao,
        pontos=pontos,
        autovalores_minimos=autovalores,
        normas_gradiente=normas,
        margem=margem,
        falhas=falhas,
        comparacao_medidas=comparacao,
    )
    logger.info(
        f"Certificado de convexidade | Modelo: {m.nome} | Função: {funcao} | "
        f"Estrito: {certificado.estrito} | Autovalor mínimo: {certificado.autovalor_minimo:.3e}",
        extra={'modelo': m.nome, 'funcao': funcao, 'estrito': certificado.estrito, 'falhas': len(falhas)},
    )
    return certificado
