"""
Curvatura média de horosferas, razões de Cheeger de bolas geodésicas e o
limite superior de λ₀ pelo quociente de Rayleigh.

Áreas e volumes vêm da redução radial: |∂B_r| = Σ_k w_k det B_k(r), onde B_k
é o tensor de Jacobi com B(0) = 0, B'(0) = Id ao longo da geodésica radial na
direção do nó k da quadratura esférica, e |B_r| = ∫₀^r |∂B_t| dt.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, interpolate, special

from core.configuracao import parametro
from core.excecoes import (
    ErroConvergencia, ErroDivergencia, ErroDominio, ErroLaboratorio, ErroPontoConjugado, ErroPrecondicao,
)
from core.numerica import derivada_cinco_pontos, quadratura_esfera
from core.paralelo import mapa_ordenado
from core.relatorios import escrever_csv
from convexidade.busemann import MedidaFronteira, RaiosAssintoticos, avaliar_busemann_lote, hessianos_assintoticos
from convexidade.certificados import amostrar_pontos_bola
from geodesicas.integrador import integrar_fluxo, par_fundamental, separar_fundamental
from variedades.geometria import base_ortonormal, referencial_ortonormal
from variedades.modelos import VariedadeCarta

logger = logging.getLogger('laboratorio.espectral')

FOLGA_DUAS_ROTAS = 1e-4
FOLGA_STOKES = 1e-3
FOLGA_CADEIA = 1e-3
DISPERSAO_HARMONICA = 1e-3


# Perfil radial

@dataclass
class PerfilRadial:
    """Geodésicas radiais a partir de o nos nós de uma quadratura de S_oM"""

    origem: np.ndarray
    r: np.ndarray
    direcoes: np.ndarray
    pesos: np.ndarray
    pontos: np.ndarray
    determinantes: np.ndarray
    curvaturas: np.ndarray

    @property
    def passo(self) -> float:
        return float(self.r[1] - self.r[0])

    @property
    def area(self) -> np.ndarray:
        """|∂B_r| em cada nó radial"""
        return self.pesos @ self.determinantes

    @property
    def volume(self) -> np.ndarray:
        return integrate.cumulative_simpson(self.area, x=self.r, initial=0.0)

    @property
    def curvatura_media_esferas(self) -> np.ndarray:
        """A'/A: média de Δd sobre a esfera ponderada pela densidade de área"""
        with np.errstate(invalid='ignore'):
            return (self.pesos @ (self.determinantes * self.curvaturas)) / self.area


def perfil_radial(m: VariedadeCarta, o=None, raio: float = None, passo: float = None,
                  ordem: int = None) -> PerfilRadial:
    """
    Integra o par fundamental ao longo das geodésicas radiais até ``raio``
    com passo uniforme; Δd = tr(B'B⁻¹) fica NaN em r = 0.
    """
    if m.dim < 2:
        raise ErroPrecondicao('A redução radial exige dimensão >= 2', modelo=m.nome)
    o = m.exigir_dominio(m.origem if o is None else o)
    raio = float(raio or parametro('RAIO_ESPECTRAL'))
    ordem = int(ordem or parametro('ORDEM_ANGULAR'))
    passo = float(passo or parametro('PASSO_INTEGRACAO'))
    n_passos = max(4, int(np.ceil(raio / passo - 1e-9)))
    passo = raio / n_passos

    unitarios, pesos = quadratura_esfera(m.dim, ordem)
    direcoes = unitarios @ base_ortonormal(m.metrica(o)).T
    quantidade = direcoes.shape[0]
    pontos = np.broadcast_to(o, direcoes.shape).copy()
    y0, y_linha0 = par_fundamental(quantidade, m.dim)
    trajetoria = integrar_fluxo(
        m, pontos, direcoes, passo, n_passos,
        referencial=referencial_ortonormal(m.metrica(pontos), direcoes), y0=y0, y_linha0=y_linha0,
    )
    if np.any(trajetoria.saiu):
        raise ErroDominio(
            f'Esfera geodésica de raio {raio} deixa a carta de {m.nome}',
            tempo_saida=float(np.nanmin(trajetoria.tempo_saida)),
        )

    _, _, b, b_linha = separar_fundamental(trajetoria.y, trajetoria.y_linha)
    r = trajetoria.tempos[0]
    with np.errstate(all='ignore'):
        determinantes = np.linalg.det(b)
    if not np.all(np.isfinite(determinantes)):
        raise ErroDivergencia(f'Densidade de área não finita em {m.nome}', raio=raio)
    nao_positivos = np.argwhere(determinantes[:, 1:] <= 0.0)
    if nao_positivos.size:
        tempo = float(r[1 + int(np.min(nao_positivos[:, 1]))])
        raise ErroPontoConjugado(f'det B anulado ao longo de geodésica radial em r ≈ {tempo:.6g}', tempo=tempo)

    curvaturas = np.full(determinantes.shape, np.nan)
    curvaturas[:, 1:] = np.trace(np.linalg.solve(b[:, 1:], b_linha[:, 1:]), axis1=-2, axis2=-1)
    logger.debug(
        f"Perfil radial | Modelo: {m.nome} | Raio: {raio:g} | Nós: {quantidade}",
        extra={'modelo': m.nome, 'raio': raio, 'nos': quantidade, 'passos': n_passos},
    )
    return PerfilRadial(
        origem=o,
        r=r,
        direcoes=direcoes,
        pesos=pesos,
        pontos=trajetoria.x,
        determinantes=determinantes,
        curvaturas=curvaturas,
    )


# Curvatura média de horosferas

@dataclass
class CurvaturaMedia:
    """h = Δb_v(p) por duas rotas: traço do hessiano coordenado e -tr D'_u(0)"""

    direcao: np.ndarray
    ponto: np.ndarray
    h: float
    h_tensor: float

    @property
    def desvio_rotas(self) -> float:
        return abs(self.h - self.h_tensor)

    def como_dict(self) -> Dict:
        return {
            'direcao': self.direcao,
            'ponto': self.ponto,
            'h': self.h,
            'h_tensor': self.h_tensor,
            'desvio_rotas': self.desvio_rotas,
        }


def curvaturas_no_ponto(m: VariedadeCarta, raios: RaiosAssintoticos, p: np.ndarray,
                         agenda_estavel: Sequence[float] = None, tolerancia: float = None,
                         extrapolacao: str = None, passo: float = None):
    """(h, h_tensor, falhas) para todas as direções de ``raios`` no ponto p"""
    quantidade = raios.direcoes.shape[0]
    lote = avaliar_busemann_lote(
        m, raios, np.arange(quantidade), np.broadcast_to(p, (quantidade, m.dim)), tolerancia, extrapolacao,
    )
    falhas: Dict[int, ErroLaboratorio] = dict(lote.falhas)
    for linha in range(quantidade):
        if linha not in falhas and not lote.convergiu[linha]:
            falhas[linha] = ErroConvergencia('Busemann não convergiu na agenda', diferencas=lote.lacunas[linha][-3:])
    h = np.full(quantidade, np.nan)
    h_tensor = np.full(quantidade, np.nan)
    validas = np.array([linha for linha in range(quantidade) if linha not in falhas], dtype=int)
    if validas.size:
        hessianos, falhas_tensor, tracos = hessianos_assintoticos(
            m, p, lote.direcoes_assintoticas[validas], agenda_estavel, passo,
        )
        g = m.metrica(p)
        h[validas] = np.trace(np.linalg.solve(g, hessianos), axis1=-2, axis2=-1)
        h_tensor[validas] = tracos
        falhas.update({int(validas[posicao]): erro for posicao, erro in falhas_tensor.items()})
        for linha in falhas:
            h[linha] = h_tensor[linha] = np.nan
    return h, h_tensor, falhas


def curvatura_media_horosfera(m: VariedadeCarta, v, p, agenda: Sequence[float] = None,
                              agenda_estavel: Sequence[float] = None, tolerancia: float = None,
                              extrapolacao: str = None, passo: float = None) -> CurvaturaMedia:
    """Curvatura média da horosfera de b_v por p"""
    p = m.exigir_dominio(p)
    raios = RaiosAssintoticos(m, np.asarray(v, dtype=float)[None], agenda, passo)
    h, h_tensor, falhas = curvaturas_no_ponto(m, raios, p, agenda_estavel, tolerancia, extrapolacao, passo)
    if falhas:
        raise falhas[0]
    resultado = CurvaturaMedia(direcao=raios.direcoes[0], ponto=p, h=float(h[0]), h_tensor=float(h_tensor[0]))
    if resultado.desvio_rotas > FOLGA_DUAS_ROTAS:
        logger.warning(
            f"Rotas da curvatura média divergem | Modelo: {m.nome} | Desvio: {resultado.desvio_rotas:.3e}",
            extra={'modelo': m.nome, 'desvio': resultado.desvio_rotas},
        )
    return resultado


@dataclass
class AmostrasCurvaturaMedia:
    amostras: List[CurvaturaMedia]
    falhas: Dict[Tuple[int, int], ErroLaboratorio] = field(default_factory=dict)

    @property
    def valores(self) -> np.ndarray:
        return np.array([amostra.h for amostra in self.amostras])

    @property
    def media(self) -> float:
        return float(np.mean(self.valores)) if self.amostras else float('nan')

    @property
    def dispersao(self) -> float:
        return float(np.ptp(self.valores)) if self.amostras else float('nan')

    @property
    def desvio_rotas(self) -> float:
        return max((amostra.desvio_rotas for amostra in self.amostras), default=float('nan'))

    @property
    def assintoticamente_harmonica(self) -> bool:
        return bool(self.amostras) and not self.falhas and self.dispersao < DISPERSAO_HARMONICA

    def como_dict(self) -> Dict:
        return {
            'amostras': len(self.amostras),
            'h_media': self.media,
            'h_dispersao': self.dispersao,
            'desvio_rotas': self.desvio_rotas,
            'assintoticamente_harmonica': self.assintoticamente_harmonica,
            'falhas': {f'{ponto}:{direcao}': erro.como_dict() for (ponto, direcao), erro in sorted(self.falhas.items())},
        }


def amostrar_curvatura_media(m: VariedadeCarta, direcoes: int = 32, pontos: np.ndarray = None,
                             quantidade_pontos: int = 10, raio_pontos: float = 1.0, semente: int = 0,
                             agenda: Sequence[float] = None, agenda_estavel: Sequence[float] = None,
                             tolerancia: float = None, extrapolacao: str = None, passo: float = None,
                             threads: int = None) -> AmostrasCurvaturaMedia:
    """
    h em cada par (direção, ponto). Direções uniformes em S_oM; pontos de
    baixa discrepância na bola B(o, raio_pontos) quando não informados.
    """
    medida = MedidaFronteira.uniforme(m, direcoes, semente)
    if pontos is None:
        pontos = amostrar_pontos_bola(m, raio_pontos, quantidade_pontos, semente=semente, passo=passo)
    pontos = np.atleast_2d(m.exigir_dominio(pontos))
    raios = RaiosAssintoticos(m, medida.direcoes, agenda, passo)

    def avaliar(indice: int):
        return curvaturas_no_ponto(m, raios, pontos[indice], agenda_estavel, tolerancia, extrapolacao, passo)

    resultados = mapa_ordenado(avaliar, list(range(pontos.shape[0])), threads)
    amostras: List[CurvaturaMedia] = []
    falhas: Dict[Tuple[int, int], ErroLaboratorio] = {}
    for indice, (h, h_tensor, falhas_ponto) in enumerate(resultados):
        falhas.update({(indice, direcao): erro for direcao, erro in falhas_ponto.items()})
        for direcao in range(medida.tamanho):
            if direcao in falhas_ponto:
                continue
            amostras.append(CurvaturaMedia(
                direcao=medida.direcoes[direcao],
                ponto=pontos[indice],
                h=float(h[direcao]),
                h_tensor=float(h_tensor[direcao]),
            ))
    resultado = AmostrasCurvaturaMedia(amostras=amostras, falhas=falhas)
    logger.info(
        f"Curvatura média de horosferas | Modelo: {m.nome} | h médio: {resultado.media:.6g} | "
        f"Dispersão: {resultado.dispersao:.3e}",
        extra={'modelo': m.nome, 'amostras': len(amostras), 'falhas': len(falhas)},
    )
    return resultado


# Razões de Cheeger

@dataclass
class VarreduraCheeger:
    raios: np.ndarray
    areas: np.ndarray
    volumes: np.ndarray
    h: Optional[float] = None
    desvio_oraculo: Optional[float] = None

    @property
    def razoes(self) -> np.ndarray:
        return self.areas / self.volumes

    @property
    def limite_stokes(self) -> Optional[bool]:
        """h |B_r| ≤ |∂B_r| + 1e-3 |B_r| em todos os raios"""
        if self.h is None:
            return None
        return bool(np.all(self.razoes >= self.h - FOLGA_STOKES))

    @property
    def decrescente(self) -> bool:
        return bool(np.all(np.diff(self.razoes) <= 1e-9))

    def pares(self) -> List[Tuple[float, float]]:
        return [(float(r), float(razao)) for r, razao in zip(self.raios, self.razoes)]

    def como_dict(self) -> Dict:
        return {
            'razoes': self.pares(),
            'h': self.h,
            'limite_stokes': self.limite_stokes,
            'decrescente': self.decrescente,
            'desvio_oraculo': self.desvio_oraculo,
        }

    def exportar_csv(self, caminho: Path) -> Path:
        return escrever_csv(caminho, ['r', 'razao'], self.pares())


def varrer_razao_cheeger(m: VariedadeCarta, o=None, raios: Sequence[float] = (1.0, 2.0, 4.0, 8.0),
                         h: float = None, passo: float = None, ordem: int = None,
                         perfil: PerfilRadial = None) -> VarreduraCheeger:
    """|∂B_r| / |B_r| para cada raio (interpolação cúbica do perfil radial)"""
    raios = np.asarray(sorted(float(r) for r in raios))
    if raios.size == 0 or raios[0] <= 0.0:
        raise ErroPrecondicao('Raios de Cheeger devem ser positivos')
    perfil = perfil or perfil_radial(m, o, raios[-1], passo, ordem)
    if perfil.r[-1] < raios[-1] - 1e-12:
        raise ErroPrecondicao('Perfil radial mais curto que o maior raio pedido', raio=float(perfil.r[-1]))
    area, volume = perfil.area, perfil.volume
    areas = interpolate.CubicSpline(perfil.r, area)(raios)
    volumes = interpolate.CubicSpline(perfil.r, volume)(raios)
    if not np.all(np.isfinite(volumes)) or np.any(volumes <= 0.0):
        raise ErroDivergencia(f'Quadratura de volume divergiu em {m.nome}')

    desvio = None
    densidade = m.oraculos.densidade_area
    if densidade is not None and np.allclose(perfil.origem, m.origem):
        esperado = densidade(perfil.r[1:])
        desvio = float(np.max(np.abs(area[1:] - esperado) / np.abs(esperado)))

    if h is None:
        h = m.bandeiras.h_assintotico
    varredura = VarreduraCheeger(raios=raios, areas=areas, volumes=volumes, h=h, desvio_oraculo=desvio)
    logger.info(
        f"Razões de Cheeger | Modelo: {m.nome} | Raios: {raios.size} | Última razão: {varredura.razoes[-1]:.6g}",
        extra={'modelo': m.nome, 'limite_stokes': varredura.limite_stokes, 'desvio_oraculo': desvio},
    )
    return varredura


# Quociente de Rayleigh

@dataclass
class ResultadoRayleigh:
    valor: float
    n_indice: int
    expoente: float
    h: float
    desvio_gradiente: float
    cauda_relativa: float
    crescimento: float
    raio: float

    @property
    def limite(self) -> float:
        return self.h * self.h / 4.0

    @property
    def acima_do_limite(self) -> bool:
        return self.valor >= self.limite - FOLGA_CADEIA

    def como_dict(self) -> Dict:
        return {
            'valor': self.valor,
            'n_indice': self.n_indice,
            'expoente': self.expoente,
            'h': self.h,
            'limite': self.limite,
            'acima_do_limite': self.acima_do_limite,
            'desvio_gradiente': self.desvio_gradiente,
            'cauda_relativa': self.cauda_relativa,
            'crescimento': self.crescimento,
        }


def _ajustar_crescimento(r: np.ndarray, area: np.ndarray) -> Tuple[float, float]:
    """log A ≈ c + γ r + k log r na metade externa do perfil; devolve (γ, k ≥ 0)"""
    externos = r >= 0.5 * r[-1]
    matriz = np.stack([np.ones(int(externos.sum())), r[externos], np.log(r[externos])], axis=1)
    coeficientes, *_ = np.linalg.lstsq(matriz, np.log(area[externos]), rcond=None)
    return float(coeficientes[1]), max(float(coeficientes[2]), 0.0)


def quociente_rayleigh_lambda0(m: VariedadeCarta, o=None, n_indice: int = 100, h: float = None,
                               raio: float = None, passo: float = None, ordem: int = None,
                               perfil: PerfilRadial = None) -> ResultadoRayleigh:
    """
    ∫|∇f_n|² / ∫f_n² para f_n = exp(-a d(o, ·)), a = (h + 1/n)/2.

    A integral radial vai até o fim do perfil; além dele a densidade segue o
    ajuste A(r) ≈ A(R)(r/R)^k e^{γ(r-R)} e a cauda sai da gama incompleta.
    ErroDivergencia quando 2a ≤ γ.
    """
    if n_indice < 1:
        raise ErroPrecondicao('O índice da função teste deve ser >= 1', n_indice=n_indice)
    if h is None:
        h = m.bandeiras.h_assintotico
    if h is None:
        raise ErroPrecondicao(f'h desconhecido para {m.nome}; informe h', modelo=m.nome)
    perfil = perfil or perfil_radial(m, o, raio, passo, ordem)
    r, area = perfil.r, perfil.area
    a = 0.5 * (h + 1.0 / n_indice)

    f = np.exp(-a * r)
    derivada = np.gradient(f, r, edge_order=2)
    derivada[2:-2] = derivada_cinco_pontos(f, perfil.passo)[2:-2]
    # |∇f| = |f'(r)| = a f
    desvio_gradiente = float(np.max(np.abs(np.abs(derivada) - a * f)) / np.max(f))

    crescimento, potencia = _ajustar_crescimento(r[1:], area[1:])
    beta = 2.0 * a - crescimento
    if beta <= 1e-9:
        raise ErroDivergencia(
            f'∫ f_n² diverge: expoente 2a = {2.0 * a:.6g} não supera o crescimento {crescimento:.6g}',
            expoente=2.0 * a, crescimento=crescimento,
        )
    R = r[-1]
    with np.errstate(over='ignore', under='ignore'):
        cauda = float(
            area[-1] * R ** -potencia * np.exp(-crescimento * R - (potencia + 1.0) * np.log(beta)
                                               + special.gammaln(potencia + 1.0))
            * special.gammaincc(potencia + 1.0, beta * R)
        )
    numerador = float(integrate.simpson(derivada ** 2 * area, x=r)) + a * a * cauda
    denominador = float(integrate.simpson(f ** 2 * area, x=r)) + cauda
    if not np.isfinite(numerador) or not np.isfinite(denominador) or denominador <= 0.0:
        raise ErroDivergencia(f'Quadratura de Rayleigh não finita em {m.nome}')

    resultado = ResultadoRayleigh(
        valor=numerador / denominador,
        n_indice=int(n_indice),
        expoente=a,
        h=float(h),
        desvio_gradiente=desvio_gradiente,
        cauda_relativa=cauda / denominador,
        crescimento=crescimento,
        raio=float(R),
    )
    logger.info(
        f"Quociente de Rayleigh | Modelo: {m.nome} | n: {n_indice} | λ₀ ≤ {resultado.valor:.6g} | "
        f"Cauda: {resultado.cauda_relativa:.2%}",
        extra={'modelo': m.nome, **{k: v for k, v in resultado.como_dict().items() if k != 'acima_do_limite'}},
    )
    return resultado


# Relatório

@dataclass
class RelatorioEspectral:
    modelo: str
    curvaturas: AmostrasCurvaturaMedia
    cheeger: VarreduraCheeger
    rayleigh: ResultadoRayleigh
    residuos: Dict[str, float] = field(default_factory=dict)

    @property
    def h_media(self) -> float:
        return self.curvaturas.media

    @property
    def fundo_faixa_essencial(self) -> float:
        return self.h_media ** 2 / 4.0

    @property
    def aprovado(self) -> bool:
        """Duas rotas sempre; Stokes e cadeia λ₀ quando h independe de (v, p)"""
        if self.curvaturas.falhas or not self.curvaturas.amostras:
            return False
        if self.curvaturas.desvio_rotas > FOLGA_DUAS_ROTAS:
            return False
        if not self.curvaturas.assintoticamente_harmonica:
            return True
        return self.residuos['stokes'] >= -FOLGA_STOKES and self.residuos['cadeia'] >= -FOLGA_CADEIA

    def como_dict(self) -> Dict:
        return {
            'modelo': self.modelo,
            'amostras_h': [(a.direcao, a.ponto, a.h) for a in self.curvaturas.amostras],
            'h_media': self.h_media,
            'h_dispersao': self.curvaturas.dispersao,
            'assintoticamente_harmonica': self.curvaturas.assintoticamente_harmonica,
            'razoes_cheeger': self.cheeger.pares(),
            'lambda0_superior': self.rayleigh.valor,
            'n_indice': self.rayleigh.n_indice,
            'fundo_faixa_essencial': self.fundo_faixa_essencial,
            'residuos': self.residuos,
            'aprovado': self.aprovado,
        }


def relatorio_espectral(m: VariedadeCarta, direcoes: int = 32, quantidade_pontos: int = 10,
                        raio_pontos: float = 1.0, raios: Sequence[float] = (1.0, 2.0, 4.0, 8.0),
                        n_indice: int = 100, raio: float = None, agenda: Sequence[float] = None,
                        agenda_estavel: Sequence[float] = None, passo: float = None, ordem: int = None,
                        semente: int = 0, threads: int = None) -> RelatorioEspectral:
    """h amostrado, razões de Cheeger e λ₀ pelo quociente de Rayleigh com h = h médio"""
    curvaturas = amostrar_curvatura_media(
        m, direcoes, quantidade_pontos=quantidade_pontos, raio_pontos=raio_pontos, semente=semente,
        agenda=agenda, agenda_estavel=agenda_estavel, passo=passo, threads=threads,
    )
    h = curvaturas.media
    perfil = perfil_radial(m, raio=max(raio or parametro('RAIO_ESPECTRAL'), max(raios)), passo=passo, ordem=ordem)
    cheeger = varrer_razao_cheeger(m, raios=raios, h=h, perfil=perfil)
    rayleigh = quociente_rayleigh_lambda0(m, n_indice=n_indice, h=h, perfil=perfil)
    residuos = {
        'duas_rotas': curvaturas.desvio_rotas,
        'dispersao': curvaturas.dispersao,
        'stokes': float(np.min(cheeger.razoes) - h),
        'cadeia': rayleigh.valor - h * h / 4.0,
        'gradiente_rayleigh': rayleigh.desvio_gradiente,
    }
    if m.bandeiras.h_assintotico is not None:
        residuos['h_declarado'] = abs(h - m.bandeiras.h_assintotico)
    relatorio = RelatorioEspectral(
        modelo=m.nome, curvaturas=curvaturas, cheeger=cheeger, rayleigh=rayleigh, residuos=residuos,
    )
    logger.info(
        f"Relatório espectral | Modelo: {m.nome} | h: {h:.6g} | λ₀ ≤ {rayleigh.valor:.6g} | "
        f"Aprovado: {relatorio.aprovado}",
        extra={'modelo': m.nome, 'residuos': residuos, 'aprovado': relatorio.aprovado},
    )
    return relatorio
