"""
Funções de Busemann b_v(x) = lim_t d(x, γ_v(t)) - t, seus gradientes e
hessianos, a função média F = Σ w_k b_{v_k} e a verificação de que as curvas
integrais de ∇b_v são geodésicas.

A origem de γ_v é a origem do modelo. Em cada tempo da agenda a aplicação
logarítmica de x até γ_v(t) fornece d(x, γ_v(t)) e a direção unitária em x que
aponta para γ_v(t); ambos convergem quando t cresce e o limite da direção é a
direção assintótica -∇b_v(x).
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, interpolate

from core.configuracao import parametro
from core.excecoes import (
    ErroConvergencia, ErroDominio, ErroLaboratorio, ErroPontoConjugado, ErroPrecondicao, ErroResultadoParcial,
)
from core.numerica import direcoes_esfera, extrapolar_neville, pesos_diadicos, simetrizar
from core.paralelo import mapa_ordenado
from geodesicas.integrador import FluxoSegmentado
from geodesicas.services import (
    exigir_hipotese_conjugados, integrar_geodesica, modo_extrapolacao, tensor_jacobi_estavel_lote,
)
from geodesicas.tiro import aplicacao_log_lote
from variedades.geometria import autovalores_metricos, base_ortonormal, laplaciano_diferencas
from variedades.modelos import VariedadeCarta

from .services import forma_coordenada

logger = logging.getLogger('laboratorio.convexidade')

FOLGA_MONOTONIA = 1e-9
FOLGA_LIMITE = 1e-6
ORDEM_MAXIMA_EXTRAPOLACAO = 5
FOLGA_SEMIDEFINIDA = 1e-6
TAMANHO_BLOCO = 8


@dataclass
class MedidaFronteira:
    """Medida de probabilidade Σ w_k δ_{v_k} em S_oM"""

    direcoes: np.ndarray
    pesos: np.ndarray

    def __post_init__(self):
        self.direcoes = np.atleast_2d(np.asarray(self.direcoes, dtype=float))
        self.pesos = np.asarray(self.pesos, dtype=float)
        if self.pesos.shape != (self.direcoes.shape[0],):
            raise ErroPrecondicao('Um peso por direção é obrigatório')
        if np.any(self.pesos <= 0.0):
            raise ErroPrecondicao('Pesos da medida devem ser positivos')
        if abs(float(self.pesos.sum()) - 1.0) > 1e-12:
            raise ErroPrecondicao('Pesos da medida devem somar 1', soma=float(self.pesos.sum()))

    @property
    def tamanho(self) -> int:
        return self.direcoes.shape[0]

    @classmethod
    def _direcoes_unitarias(cls, m: VariedadeCarta, quantidade: int, semente: int) -> np.ndarray:
        """Direções ortonormais para metric(o): equiespaçadas em dim 2, baixa discrepância acima"""
        base = base_ortonormal(m.metrica(m.origem))
        return np.einsum('ij,kj->ki', base, direcoes_esfera(m.dim, quantidade, semente))

    @classmethod
    def uniforme(cls, m: VariedadeCarta, quantidade: int, semente: int = 0) -> 'MedidaFronteira':
        return cls(cls._direcoes_unitarias(m, quantidade, semente), np.full(quantidade, 1.0 / quantidade))

    @classmethod
    def diadica(cls, m: VariedadeCarta, quantidade: int, semente: int = 0) -> 'MedidaFronteira':
        """Pesos 2^{-k} renormalizados sobre as mesmas direções da medida uniforme"""
        return cls(cls._direcoes_unitarias(m, quantidade, semente), pesos_diadicos(quantidade))

    def com_pesos(self, pesos: np.ndarray) -> 'MedidaFronteira':
        return MedidaFronteira(self.direcoes, pesos)


class RaiosAssintoticos:
    """Pontos γ_v(t) para cada direção v e cada tempo da agenda"""

    def __init__(self, m: VariedadeCarta, direcoes: np.ndarray, agenda: Sequence[float] = None,
                 passo: float = None):
        exigir_hipotese_conjugados(m, 'A função de Busemann')
        self.m = m
        self.agenda = sorted(float(t) for t in (agenda or parametro('AGENDA_BUSEMANN')))
        origem = m.origem
        direcoes = np.atleast_2d(np.asarray(direcoes, dtype=float))
        self.direcoes = m.exigir_unitario(np.broadcast_to(origem, direcoes.shape), direcoes)
        quantidade = self.direcoes.shape[0]
        fluxo = FluxoSegmentado(m, np.broadcast_to(origem, self.direcoes.shape), self.direcoes, passo=passo)
        self.pontos = np.full((len(self.agenda), quantidade, m.dim), np.nan)
        for k, t in enumerate(self.agenda):
            fluxo.avancar_ate(t)
            self.pontos[k] = np.where(fluxo.saiu[:, None], np.nan, fluxo.x)
        self.saiu = fluxo.saiu.copy()
        self.tempo_saida = fluxo.tempo_saida.copy()
        if np.any(self.saiu):
            logger.warning(
                f"Raios de Busemann deixam a carta | Modelo: {m.nome} | Direções: {int(self.saiu.sum())}",
                extra={'modelo': m.nome, 'direcoes': int(self.saiu.sum())},
            )


@dataclass
class LoteBusemann:
    valores: np.ndarray
    direcoes_assintoticas: np.ndarray
    lacunas: List[List[float]]
    tempo_truncamento: np.ndarray
    convergiu: np.ndarray
    monotona: np.ndarray
    limitada: np.ndarray
    distancias_origem: np.ndarray
    falhas: Dict[int, ErroLaboratorio] = field(default_factory=dict)
    vetores_log: Optional[np.ndarray] = None


def truncamento_admissivel(anterior: Optional[float], valor: float, distancia_origem: float) -> Tuple[bool, bool]:
    """
    (monótono, limitado) para um novo truncamento b_t(x) = d(x, γ_v(t)) - t.

    Pela desigualdade triangular b_t é não crescente em t e |b_t(x)| ≤ d(o, x).
    """
    monotono = anterior is None or valor <= anterior + FOLGA_MONOTONIA
    limitado = not np.isfinite(distancia_origem) or abs(valor) <= distancia_origem + FOLGA_LIMITE
    return monotono, limitado


def avaliar_busemann_lote(m: VariedadeCarta, raios: RaiosAssintoticos, indices: np.ndarray, pontos: np.ndarray,
                          tolerancia: float = None, extrapolacao: str = None,
                          chutes: Optional[np.ndarray] = None) -> LoteBusemann:
    """
    b_{v_i}(x_i) e a direção assintótica em x_i para cada linha (i = indices).

    Para cada t da agenda: w = log_x(γ_v(t)), b_t = |w| - t e u_t = w/|w|. No
    modo 'richardson' os valores são extrapolados em 1/t pelo polinômio que
    interpola os últimos iterados; a linha para quando a diferença entre
    estimativas sucessivas (valor e direção) fica abaixo da tolerância.
    ``chutes`` (K, B, n) guarda e reaproveita os vetores log de chamadas
    anteriores.
    """
    pontos = np.atleast_2d(np.asarray(pontos, dtype=float))
    indices = np.asarray(indices, dtype=int)
    lote, n = pontos.shape
    tolerancia = tolerancia or m.tolerancia('busemann', parametro('TOLERANCIA_BUSEMANN'))
    modo = modo_extrapolacao(m, extrapolacao)
    agenda = raios.agenda

    origem = np.broadcast_to(m.origem, pontos.shape)
    ao_centro = aplicacao_log_lote(m, origem, pontos)
    distancias_origem = np.where(ao_centro.convergiu, m.norma(origem, ao_centro.vetores), np.nan)
    raio_limite = parametro('RAIO_BUSEMANN')
    if np.nanmax(distancias_origem, initial=0.0) > raio_limite:
        logger.warning(
            f"Busemann avaliado fora do raio de amostragem | Modelo: {m.nome} | "
            f"d(o, x) máximo: {float(np.nanmax(distancias_origem)):.3f}",
            extra={'modelo': m.nome, 'raio_limite': raio_limite},
        )

    brutos_valor = [[] for _ in range(lote)]
    brutos_direcao = [[] for _ in range(lote)]
    tempos_usados = [[] for _ in range(lote)]
    estimativas_valor = [[] for _ in range(lote)]
    estimativas_direcao = [[] for _ in range(lote)]
    lacunas = [[] for _ in range(lote)]
    convergiu = np.zeros(lote, dtype=bool)
    monotona = np.ones(lote, dtype=bool)
    limitada = np.ones(lote, dtype=bool)
    falhas: Dict[int, ErroLaboratorio] = {}
    vetores_log = np.full((len(agenda), lote, n), np.nan) if chutes is None else chutes

    for linha in np.flatnonzero(raios.saiu[indices]):
        falhas[int(linha)] = ErroDominio(
            'γ_v deixa a carta antes do fim da agenda', tempo_saida=float(raios.tempo_saida[indices[linha]]),
        )
    ativos = np.array([linha for linha in range(lote) if linha not in falhas], dtype=int)
    vetor_anterior, distancia_anterior, tempo_anterior = None, None, 0.0

    for k, t in enumerate(agenda):
        if ativos.size == 0:
            break
        alvos = raios.pontos[k, indices[ativos]]
        chute = vetores_log[k, ativos]
        if np.any(~np.isfinite(chute)):
            # vetor anterior esticado até o novo alvo
            if vetor_anterior is not None:
                esticado = vetor_anterior[ativos] * ((distancia_anterior[ativos] + t - tempo_anterior)
                                                     / np.maximum(distancia_anterior[ativos], 1e-300))[:, None]
                chute = np.where(np.isfinite(chute), chute, esticado)
            else:
                chute = None
        tiro = aplicacao_log_lote(m, pontos[ativos], alvos, chute=chute)
        vetores_log[k, ativos] = tiro.vetores
        distancias = m.norma(pontos[ativos], tiro.vetores)
        if vetor_anterior is None:
            vetor_anterior = np.full((lote, n), np.nan)
            distancia_anterior = np.full(lote, np.nan)
        vetor_anterior[ativos] = tiro.vetores
        distancia_anterior[ativos] = distancias
        tempo_anterior = t

        restantes = []
        for posicao, linha in enumerate(ativos):
            if not tiro.convergiu[posicao]:
                falhas[int(linha)] = ErroConvergencia(
                    f'Aplicação logarítmica até γ_v({t:g}) não convergiu',
                    residuo=float(tiro.residuos[posicao]), tempo=t,
                )
                continue
            valor = float(distancias[posicao] - t)
            monotono, limitado = truncamento_admissivel(
                brutos_valor[linha][-1] if brutos_valor[linha] else None, valor, distancias_origem[linha],
            )
            monotona[linha] &= monotono
            limitada[linha] &= limitado
            brutos_valor[linha].append(valor)
            brutos_direcao[linha].append(tiro.vetores[posicao] / distancias[posicao])
            tempos_usados[linha].append(t)
            if modo == 'richardson' and len(tempos_usados[linha]) >= 2:
                ordem = min(len(tempos_usados[linha]) - 1, ORDEM_MAXIMA_EXTRAPOLACAO)
                estimativa_valor = float(extrapolar_neville(tempos_usados[linha], brutos_valor[linha], ordem))
                estimativa_direcao = extrapolar_neville(tempos_usados[linha], brutos_direcao[linha], ordem)
                estimativa_direcao = m.normalizar(pontos[linha], estimativa_direcao)
            else:
                estimativa_valor, estimativa_direcao = valor, brutos_direcao[linha][-1]
            estimativas_valor[linha].append(estimativa_valor)
            estimativas_direcao[linha].append(estimativa_direcao)
            if len(estimativas_valor[linha]) >= 2:
                lacuna = max(
                    abs(estimativas_valor[linha][-1] - estimativas_valor[linha][-2]),
                    float(m.norma(pontos[linha], estimativas_direcao[linha][-1] - estimativas_direcao[linha][-2])),
                )
                lacunas[linha].append(lacuna)
                if lacuna < tolerancia:
                    convergiu[linha] = True
                    continue
            restantes.append(linha)
        ativos = np.array(restantes, dtype=int)

    valores = np.full(lote, np.nan)
    direcoes = np.full((lote, n), np.nan)
    truncamento = np.full(lote, np.nan)
    for linha in range(lote):
        if estimativas_valor[linha] and linha not in falhas:
            valores[linha] = estimativas_valor[linha][-1]
            direcoes[linha] = estimativas_direcao[linha][-1]
            truncamento[linha] = tempos_usados[linha][-1]

    if np.any(~monotona) or np.any(~limitada):
        logger.warning(
            f"Truncamentos de Busemann inadmissíveis | Modelo: {m.nome} | "
            f"Não monótonas: {int((~monotona).sum())} | Fora da cota: {int((~limitada).sum())}",
            extra={'modelo': m.nome, 'nao_monotonas': int((~monotona).sum()),
                   'fora_da_cota': int((~limitada).sum())},
        )
    return LoteBusemann(
        valores=valores,
        direcoes_assintoticas=direcoes,
        lacunas=lacunas,
        tempo_truncamento=truncamento,
        convergiu=convergiu,
        monotona=monotona,
        limitada=limitada,
        distancias_origem=distancias_origem,
        falhas=falhas,
        vetores_log=vetores_log,
    )


@dataclass
class AvaliacaoBusemann:
    """b_v(x) com gradiente (vetor coordenado) e, quando pedido, o hessiano (forma coordenada)"""

    direcao: np.ndarray
    ponto: np.ndarray
    valor: float
    tempo_truncamento: float
    lacuna_extrapolacao: float
    convergiu: bool
    monotona: bool
    extrapolacao: str
    metrica: np.ndarray
    limitada: bool = True
    gradiente: Optional[np.ndarray] = None
    hessiano: Optional[np.ndarray] = None
    diagnosticos: Dict = field(default_factory=dict)

    @property
    def norma_gradiente(self) -> Optional[float]:
        if self.gradiente is None:
            return None
        return float(np.sqrt(self.gradiente @ self.metrica @ self.gradiente))

    def como_dict(self) -> Dict:
        return {
            'direcao': self.direcao,
            'ponto': self.ponto,
            'valor': self.valor,
            'gradiente': self.gradiente,
            'hessiano': self.hessiano,
            'tempo_truncamento': self.tempo_truncamento,
            'lacuna_extrapolacao': self.lacuna_extrapolacao,
            'convergiu': self.convergiu,
            'monotona': self.monotona,
            'limitada': self.limitada,
            'extrapolacao': self.extrapolacao,
            **self.diagnosticos,
        }


def _avaliar_um(m: VariedadeCarta, v, x, agenda, tolerancia, extrapolacao, passo) -> Tuple[LoteBusemann, np.ndarray]:
    x = m.exigir_dominio(x)
    raios = RaiosAssintoticos(m, np.asarray(v, dtype=float)[None], agenda, passo)
    lote = avaliar_busemann_lote(m, raios, np.zeros(1, dtype=int), x[None], tolerancia, extrapolacao)
    if 0 in lote.falhas:
        raise lote.falhas[0]
    return lote, x


def valor_busemann(m: VariedadeCarta, v, x, agenda: Sequence[float] = None, tolerancia: float = None,
                   extrapolacao: str = None, passo: float = None) -> AvaliacaoBusemann:
    """b_v(x); sem convergência na agenda devolve a última estimativa com ``convergiu=False``"""
    lote, x = _avaliar_um(m, v, x, agenda, tolerancia, extrapolacao, passo)
    lacunas = lote.lacunas[0]
    avaliacao = AvaliacaoBusemann(
        direcao=np.asarray(v, dtype=float),
        ponto=x,
        valor=float(lote.valores[0]),
        tempo_truncamento=float(lote.tempo_truncamento[0]),
        lacuna_extrapolacao=lacunas[-1] if lacunas else float('inf'),
        convergiu=bool(lote.convergiu[0]),
        monotona=bool(lote.monotona[0]),
        extrapolacao=modo_extrapolacao(m, extrapolacao),
        metrica=m.metrica(x),
        limitada=bool(lote.limitada[0]),
        diagnosticos={'direcao_assintotica': lote.direcoes_assintoticas[0]},
    )
    if not avaliacao.convergiu:
        logger.warning(
            f"Busemann não convergiu | Modelo: {m.nome} | Lacuna: {avaliacao.lacuna_extrapolacao:.3e}",
            extra={'modelo': m.nome, 'lacunas': lacunas[-3:]},
        )
    return avaliacao


def gradiente_busemann(m: VariedadeCarta, v, p, agenda: Sequence[float] = None, tolerancia: float = None,
                       extrapolacao: str = None, passo: float = None,
                       verificar_derivada: bool = False) -> AvaliacaoBusemann:
    """
    ∇b_v(p) = -u com u a direção assintótica em p. Com ``verificar_derivada``
    compara a derivada direcional de b_v ao longo de u (que vale -1) com
    diferenças centrais de passo PASSO_BUSEMANN.
    """
    avaliacao = valor_busemann(m, v, p, agenda, tolerancia, extrapolacao, passo)
    avaliacao.gradiente = -avaliacao.diagnosticos['direcao_assintotica']
    if verificar_derivada:
        h = parametro('PASSO_BUSEMANN')
        u = -avaliacao.gradiente
        frente = valor_busemann(m, v, avaliacao.ponto + h * u, agenda, tolerancia, extrapolacao, passo).valor
        tras = valor_busemann(m, v, avaliacao.ponto - h * u, agenda, tolerancia, extrapolacao, passo).valor
        derivada = (frente - tras) / (2.0 * h)
        avaliacao.diagnosticos['derivada_direcional'] = derivada
        avaliacao.diagnosticos['desvio_derivada'] = abs(derivada + 1.0)
    return avaliacao


def hessianos_assintoticos(m: VariedadeCarta, p: np.ndarray, assintoticas: np.ndarray,
                           agenda_estavel: Sequence[float] = None, passo: float = None):
    """
    Formas coordenadas -D'_u(0) no complemento de cada direção assintótica u,
    falhas por linha e -tr D'_u(0) calculado no referencial.
    """
    tensores = tensor_jacobi_estavel_lote(
        m, np.broadcast_to(p, assintoticas.shape), assintoticas, agenda_estavel, passo=passo,
    )
    g = m.metrica(p)
    hessianos = np.full((assintoticas.shape[0], m.dim, m.dim), np.nan)
    tracos = np.full(assintoticas.shape[0], np.nan)
    falhas: Dict[int, ErroLaboratorio] = {}
    for linha in range(assintoticas.shape[0]):
        if linha in tensores.falhas:
            tempo = tensores.tempos_falha[linha]
            if tensores.falhas[linha] == 'ponto_conjugado':
                falhas[linha] = ErroPontoConjugado('Ponto conjugado ao longo da geodésica assintótica', tempo=tempo)
            else:
                falhas[linha] = ErroDominio('Geodésica assintótica deixa a carta', tempo_saida=tempo)
            continue
        if not tensores.convergiu[linha]:
            falhas[linha] = ErroConvergencia(
                'Tensor estável não convergiu na direção assintótica', diferencas=tensores.lacunas[linha][-3:],
            )
            continue
        hessianos[linha] = forma_coordenada(
            g, assintoticas[linha], tensores.referenciais[linha], 0.0, -simetrizar(tensores.d0_linha[linha]),
        )
        tracos[linha] = -float(np.trace(tensores.d0_linha[linha]))
    return hessianos, falhas, tracos


def hessiano_busemann(m: VariedadeCarta, v, p, agenda: Sequence[float] = None, agenda_estavel: Sequence[float] = None,
                      tolerancia: float = None, extrapolacao: str = None, passo: float = None) -> AvaliacaoBusemann:
    """
    Hess b_v(p)(x, x) = -<D'_u(0) x⊥, x⊥> com u = -∇b_v(p) e x⊥ a projeção
    ortogonal a u. Aniquila o gradiente por construção.
    """
    avaliacao = gradiente_busemann(m, v, p, agenda, tolerancia, extrapolacao, passo)
    u = -avaliacao.gradiente
    hessianos, falhas, _ = hessianos_assintoticos(m, avaliacao.ponto, u[None], agenda_estavel, passo)
    if falhas:
        raise falhas[0]
    hessiano = hessianos[0]
    g = avaliacao.metrica
    anulado = np.linalg.solve(g, hessiano @ avaliacao.gradiente)
    autovalores = autovalores_metricos(hessiano, g)
    avaliacao.hessiano = hessiano
    avaliacao.diagnosticos.update({
        'aniquilamento': float(np.sqrt(max(anulado @ g @ anulado, 0.0))),
        'autovalor_minimo': float(autovalores[0]),
        'semidefinida': bool(autovalores[0] >= -FOLGA_SEMIDEFINIDA),
    })
    return avaliacao


# Função média F

@dataclass
class ValorFuncaoMedia:
    valor: float
    gradiente: np.ndarray
    hessiano: np.ndarray
    metrica: np.ndarray
    ponto: np.ndarray
    hessianos_direcoes: np.ndarray = None
    gradientes_direcoes: np.ndarray = None
    valores_direcoes: np.ndarray = None

    @property
    def norma_gradiente(self) -> float:
        return float(np.sqrt(self.gradiente @ self.metrica @ self.gradiente))

    @property
    def autovalor_minimo(self) -> float:
        return float(autovalores_metricos(self.hessiano, self.metrica)[0])

    @property
    def laplaciano(self) -> float:
        return float(np.trace(np.linalg.solve(self.metrica, self.hessiano)))

    def reponderar(self, pesos: np.ndarray) -> 'ValorFuncaoMedia':
        """Mesmas avaliações por direção com outra medida"""
        pesos = np.asarray(pesos, dtype=float)
        return ValorFuncaoMedia(
            valor=float(pesos @ self.valores_direcoes),
            gradiente=pesos @ self.gradientes_direcoes,
            hessiano=np.einsum('k,kij->ij', pesos, self.hessianos_direcoes),
            metrica=self.metrica,
            ponto=self.ponto,
            hessianos_direcoes=self.hessianos_direcoes,
            gradientes_direcoes=self.gradientes_direcoes,
            valores_direcoes=self.valores_direcoes,
        )

    def como_dict(self) -> Dict:
        return {
            'ponto': self.ponto,
            'valor': self.valor,
            'gradiente': self.gradiente,
            'hessiano': self.hessiano,
            'norma_gradiente': self.norma_gradiente,
            'autovalor_minimo': self.autovalor_minimo,
            'laplaciano': self.laplaciano,
        }


def funcao_media_F(m: VariedadeCarta, medida: MedidaFronteira, p, agenda: Sequence[float] = None,
                   agenda_estavel: Sequence[float] = None, tolerancia: float = None, extrapolacao: str = None,
                   passo: float = None, com_hessiano: bool = True, threads: int = None,
                   raios: RaiosAssintoticos = None) -> ValorFuncaoMedia:
    """
    F(p) = Σ w_k b_{v_k}(p) com gradiente e hessiano ponderados.

    As direções são divididas em blocos avaliados em paralelo; a soma é feita
    na ordem das direções. Qualquer direção sem convergência gera
    ErroResultadoParcial com as falhas por índice.
    """
    p = m.exigir_dominio(p)
    raios = raios or RaiosAssintoticos(m, medida.direcoes, agenda, passo)
    quantidade = medida.tamanho

    def avaliar_bloco(indices: np.ndarray):
        lote = avaliar_busemann_lote(
            m, raios, indices, np.broadcast_to(p, (indices.size, m.dim)), tolerancia, extrapolacao,
        )
        falhas = dict(lote.falhas)
        for posicao in range(indices.size):
            if posicao not in falhas and not lote.convergiu[posicao]:
                falhas[posicao] = ErroConvergencia(
                    'Busemann não convergiu na agenda', diferencas=lote.lacunas[posicao][-3:],
                )
        hessianos = np.full((indices.size, m.dim, m.dim), np.nan)
        if com_hessiano:
            validas = np.array([posicao for posicao in range(indices.size) if posicao not in falhas], dtype=int)
            if validas.size:
                parciais, falhas_tensor, _ = hessianos_assintoticos(
                    m, p, lote.direcoes_assintoticas[validas], agenda_estavel, passo,
                )
                hessianos[validas] = parciais
                falhas.update({int(validas[posicao]): erro for posicao, erro in falhas_tensor.items()})
        return lote.valores, -lote.direcoes_assintoticas, hessianos, {int(indices[i]): e for i, e in falhas.items()}

    # blocos de tamanho fixo: o resultado não depende do número de threads
    blocos = [
        np.arange(inicio, min(inicio + TAMANHO_BLOCO, quantidade)) for inicio in range(0, quantidade, TAMANHO_BLOCO)
    ]
    partes = mapa_ordenado(avaliar_bloco, blocos, threads)
    valores = np.concatenate([parte[0] for parte in partes])
    gradientes = np.concatenate([parte[1] for parte in partes])
    hessianos = np.concatenate([parte[2] for parte in partes])
    falhas = {indice: erro for parte in partes for indice, erro in parte[3].items()}
    if falhas:
        logger.error(
            f"Função média com direções falhas | Modelo: {m.nome} | Falhas: {len(falhas)} de {quantidade}",
            extra={'modelo': m.nome, 'falhas': sorted(falhas)},
        )
        raise ErroResultadoParcial(f'{len(falhas)} de {quantidade} direções falharam', falhas=falhas)

    resultado = ValorFuncaoMedia(
        valor=0.0,
        gradiente=np.zeros(m.dim),
        hessiano=np.zeros((m.dim, m.dim)),
        metrica=m.metrica(p),
        ponto=p,
        hessianos_direcoes=hessianos if com_hessiano else np.zeros((quantidade, m.dim, m.dim)),
        gradientes_direcoes=gradientes,
        valores_direcoes=valores,
    ).reponderar(medida.pesos)
    logger.info(
        f"Função média | Modelo: {m.nome} | Direções: {quantidade} | Valor: {resultado.valor:.6g}",
        extra={'modelo': m.nome, 'direcoes': quantidade, 'valor': resultado.valor},
    )
    return resultado


def bilaplaciano_F(m: VariedadeCarta, medida: MedidaFronteira, p, passo_malha: float = 0.05,
                   agenda: Sequence[float] = None, agenda_estavel: Sequence[float] = None,
                   threads: int = None) -> float:
    """Δ²F em p: laplaciano por diferenças do campo escalar ΔF"""
    raios = RaiosAssintoticos(m, medida.direcoes, agenda)

    def laplaciano(x):
        return funcao_media_F(
            m, medida, x, agenda_estavel=agenda_estavel, threads=threads, raios=raios,
        ).laplaciano

    return laplaciano_diferencas(m, laplaciano, np.asarray(p, dtype=float), passo_malha)


# Curvas integrais de ∇b_v

@dataclass
class ResultadoCurvaIntegral:
    desvio_maximo: float
    tempos: np.ndarray
    fluxo: np.ndarray
    geodesica: np.ndarray
    avaliacoes: int

    @property
    def aprovado(self) -> bool:
        return self.desvio_maximo < 1e-3

    def como_dict(self) -> Dict:
        return {
            'desvio_maximo': self.desvio_maximo,
            'aprovado': self.aprovado,
            'avaliacoes': self.avaliacoes,
            'T': float(self.tempos[-1]),
        }


def verificar_curva_integral(m: VariedadeCarta, v, p, T: float = 5.0, agenda: Sequence[float] = None,
                             tolerancia: float = 1e-8, passo: float = None) -> ResultadoCurvaIntegral:
    """
    Integra x' = ∇b_v(x) a partir de p (RK45 adaptativo do scipy) e compara
    com a geodésica de velocidade inicial ∇b_v(p) nos mesmos tempos.
    """
    p = m.exigir_dominio(p)
    raios = RaiosAssintoticos(m, np.asarray(v, dtype=float)[None], agenda, passo)
    chutes = {'vetores': None}
    contagem = {'avaliacoes': 0}

    def campo(_, x):
        lote = avaliar_busemann_lote(
            m, raios, np.zeros(1, dtype=int), x[None], tolerancia, chutes=chutes['vetores'],
        )
        if 0 in lote.falhas:
            raise lote.falhas[0]
        chutes['vetores'] = lote.vetores_log.copy()
        contagem['avaliacoes'] += 1
        return -lote.direcoes_assintoticas[0]

    solucao = integrate.solve_ivp(campo, (0.0, T), p, method='RK45', rtol=1e-6, atol=1e-8)
    if not solucao.success:
        raise ErroConvergencia(f'Fluxo do gradiente falhou: {solucao.message}')
    caminho = integrar_geodesica(m, p, campo(0.0, p), T, passo=passo)
    if caminho.truncado:
        raise ErroDominio('Geodésica de comparação deixa a carta', tempo_saida=caminho.tempo_saida)
    spline = interpolate.CubicSpline(caminho.tempos, caminho.pontos, axis=0)
    geodesica = spline(solucao.t)
    fluxo = solucao.y.T
    resultado = ResultadoCurvaIntegral(
        desvio_maximo=float(np.max(np.abs(fluxo - geodesica))),
        tempos=solucao.t,
        fluxo=fluxo,
        geodesica=geodesica,
        avaliacoes=contagem['avaliacoes'],
    )
    logger.info(
        f"Curva integral de ∇b_v | Modelo: {m.nome} | Desvio: {resultado.desvio_maximo:.3e}",
        extra={'modelo': m.nome, 'desvio_maximo': resultado.desvio_maximo, 'avaliacoes': resultado.avaliacoes},
    )
    return resultado
