"""
Funções convexas construídas a partir da distância.

Hessiano de r = d(p, ·) via campos de Jacobi com Y(0) = 0, hessiano de
u = r²/2, a função de exaustão f = sqrt(1 + r²), a comparação λ(s) ≤ s e as
constantes (c1, c2, α, β) do teorema de continuidade absoluta radial.

Hessianos são devolvidos como formas bilineares coordenadas; autovalores são
generalizados em relação à métrica do ponto.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from core.configuracao import parametro
from core.excecoes import ErroDominio, ErroHipotese, ErroSingularidade
from core.numerica import derivada_cinco_pontos, direcoes_esfera, segunda_derivada_cinco_pontos, simetrizar
from geodesicas.integrador import integrar_fluxo, par_fundamental, separar_fundamental
from geodesicas.services import aplicacao_log, integrar_geodesica
from variedades.auditoria import AuditoriaRadial
from variedades.geometria import autovalores_metricos, base_ortonormal, referencial_ortonormal
from variedades.modelos import VariedadeCarta

logger = logging.getLogger('laboratorio.convexidade')

FOLGA_LAMBDA = 1e-6
FOLGA_BETA = 1e-6


def forma_coordenada(g: np.ndarray, direcao: np.ndarray, referencial: np.ndarray,
                     radial: float, transversal: np.ndarray) -> np.ndarray:
    """
    Forma bilinear coordenada g F diag(radial, transversal) Fᵀ g, com
    F = [direcao | referencial] g-ortonormal.
    """
    n = g.shape[-1]
    base = np.concatenate([direcao[:, None], referencial], axis=1)
    bloco = np.zeros((n, n))
    bloco[0, 0] = radial
    bloco[1:, 1:] = transversal
    return simetrizar(g @ base @ bloco @ base.T @ g)


@dataclass
class DadosRadiais:
    """r = d(p, q), ∇r(q) = γ'(r) e o operador de forma S = B'B⁻¹ no referencial em q"""

    raio: float
    direcao: np.ndarray
    referencial: np.ndarray
    forma: np.ndarray
    metrica: np.ndarray

    def hessiano(self) -> np.ndarray:
        return forma_coordenada(self.metrica, self.direcao, self.referencial, 0.0, self.forma)


def dados_radiais(m: VariedadeCarta, p, q) -> DadosRadiais:
    p = m.exigir_dominio(p)
    q = m.exigir_dominio(q)
    w = aplicacao_log(m, p, q)
    raio = float(m.norma(p, w))
    if raio == 0.0:
        raise ErroSingularidade('r = d(p, ·) não é suave em p', ponto=p)
    caminho = integrar_geodesica(m, p, w / raio, raio)
    if caminho.truncado:
        raise ErroDominio('Geodésica de p a q deixa a carta', tempo_saida=caminho.tempo_saida)
    _, _, b, b_linha = (componente[-1] for componente in caminho.fundamental)
    return DadosRadiais(
        raio=raio,
        direcao=caminho.velocidades[-1],
        referencial=caminho.referencial[-1],
        forma=simetrizar(np.linalg.solve(b.T, b_linha.T).T),
        metrica=m.metrica(caminho.pontos[-1]),
    )


def hessiano_distancia(m: VariedadeCarta, p, q) -> np.ndarray:
    """Hess r em q: zero na direção radial, B'B⁻¹ no complemento"""
    return dados_radiais(m, p, q).hessiano()


def hessiano_distancia_quadrado(m: VariedadeCarta, p, q) -> np.ndarray:
    """Hess u = dr² + r Hess r para u = r²/2; em q = p é a métrica"""
    p = m.exigir_dominio(p)
    q = m.exigir_dominio(q)
    if np.array_equal(p, q):
        return m.metrica(p)
    dados = dados_radiais(m, p, q)
    return forma_coordenada(dados.metrica, dados.direcao, dados.referencial, 1.0, dados.raio * dados.forma)


@dataclass
class ValorExaustao:
    """f(q) = sqrt(1 + r²) com gradiente (vetor coordenado) e hessiano (forma coordenada)"""

    valor: float
    gradiente: np.ndarray
    hessiano: np.ndarray
    metrica: np.ndarray
    raio: float

    @property
    def norma_gradiente(self) -> float:
        return float(np.sqrt(self.gradiente @ self.metrica @ self.gradiente))

    @property
    def autovalor_minimo(self) -> float:
        return float(autovalores_metricos(self.hessiano, self.metrica)[0])

    @property
    def limite_inferior(self) -> float:
        """(1 + r²)^{-3/2}, válido sob curvatura radial não positiva"""
        return float((1.0 + self.raio ** 2) ** -1.5)

    @property
    def laplaciano(self) -> float:
        return float(np.trace(np.linalg.solve(self.metrica, self.hessiano)))


def funcao_exaustao(m: VariedadeCarta, p, q) -> ValorExaustao:
    """
    f = sqrt(1 + r²); Hess f = (1 + r²)^{-3/2} dr² + r (1 + r²)^{-1/2} Hess r.
    Em q = p: f = 1, ∇f = 0 e Hess f = métrica.
    """
    p = m.exigir_dominio(p)
    q = m.exigir_dominio(q)
    if np.array_equal(p, q):
        g = m.metrica(p)
        return ValorExaustao(valor=1.0, gradiente=np.zeros(m.dim), hessiano=g, metrica=g, raio=0.0)
    dados = dados_radiais(m, p, q)
    r = dados.raio
    f = np.sqrt(1.0 + r * r)
    return ValorExaustao(
        valor=float(f),
        gradiente=(r / f) * dados.direcao,
        hessiano=forma_coordenada(dados.metrica, dados.direcao, dados.referencial, f ** -3, (r / f) * dados.forma),
        metrica=dados.metrica,
        raio=r,
    )


# Comparação λ(s) ≤ s

@dataclass
class ResultadoRazaoLambda:
    """max de λ(s) - s, λ(s) = |Y(s)|² / <Y'(s), Y(s)> para Y(0) = 0"""

    aprovado: bool
    excesso_maximo: float
    tempo: Optional[float]
    derivada_inicial: Optional[np.ndarray]
    desvio_igualdade: float
    diagnostico: bool
    t_max: float
    truncado: bool = False

    @property
    def veredito(self) -> str:
        return 'pass' if self.aprovado else 'fail'

    def como_dict(self) -> Dict:
        return {
            'veredito': self.veredito,
            'excesso_maximo': self.excesso_maximo,
            'tempo': self.tempo,
            'derivada_inicial': self.derivada_inicial,
            'desvio_igualdade': self.desvio_igualdade,
            'diagnostico': self.diagnostico,
            't_max': self.t_max,
            'truncado': self.truncado,
        }


def verificar_razao_lambda(m: VariedadeCarta, p, v, t_max: float, auditoria: AuditoriaRadial = None,
                           direcoes: int = 16, diagnostico: bool = False, passo: float = None) -> ResultadoRazaoLambda:
    """
    λ(s) ≤ s + 1e-6 nos nós s ∈ (0, t_max] para Y'(0) em ``direcoes``
    direções do referencial. Exige a auditoria radial 'nonpositive', exceto
    em modo diagnóstico.
    """
    if not diagnostico:
        if auditoria is None:
            raise ErroHipotese('A comparação λ(s) ≤ s exige a auditoria de curvatura radial', modelo=m.nome)
        if not auditoria.nao_positiva:
            raise ErroHipotese(
                'Curvatura radial positiva encontrada pela auditoria',
                modelo=m.nome, pior_valor=auditoria.pior_valor, tempo=auditoria.tempo,
            )
    caminho = integrar_geodesica(m, p, v, t_max, passo=passo)
    _, _, b, b_linha = caminho.fundamental
    k = m.dim - 1
    iniciais = direcoes_esfera(k, direcoes) if k >= 2 else np.ones((1, 1))
    y = np.einsum('tij,dj->tdi', b[1:], iniciais)
    y_linha = np.einsum('tij,dj->tdi', b_linha[1:], iniciais)
    normas = np.einsum('tdi,tdi->td', y, y)
    produtos = np.einsum('tdi,tdi->td', y_linha, y)
    s = caminho.tempos[1:, None]
    with np.errstate(divide='ignore', invalid='ignore'):
        razao = normas / produtos
    excesso = np.where(produtos > 0.0, razao - s, np.inf)
    linha, coluna = np.unravel_index(int(np.argmax(excesso)), excesso.shape)
    excesso_maximo = float(excesso[linha, coluna])
    aprovado = excesso_maximo <= FOLGA_LAMBDA
    resultado = ResultadoRazaoLambda(
        aprovado=aprovado,
        excesso_maximo=excesso_maximo,
        tempo=None if aprovado else float(s[linha, 0]),
        derivada_inicial=None if aprovado else iniciais[coluna],
        desvio_igualdade=float(np.max(np.abs(np.where(produtos > 0.0, razao - s, np.inf)))),
        diagnostico=diagnostico,
        t_max=float(t_max),
        truncado=caminho.truncado,
    )
    logger.info(
        f"Razão λ(s) | Modelo: {m.nome} | Veredito: {resultado.veredito} | Excesso: {excesso_maximo:.3e}",
        extra={'modelo': m.nome, 'veredito': resultado.veredito, 'excesso_maximo': excesso_maximo},
    )
    return resultado


# Constantes do teorema radial

@dataclass
class ConstantesRadiais:
    c1: float
    c2: float
    alfa: float
    beta: float
    beta_traco: float
    raio: float
    direcoes: int
    perfil: Dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def limite_inferior_beta(self) -> float:
        return -1.5 * self.c1 - 0.25 * self.c2

    @property
    def desigualdade_beta(self) -> bool:
        return self.beta >= self.limite_inferior_beta - FOLGA_BETA

    def como_dict(self) -> Dict:
        return {
            'c1': self.c1,
            'c2': self.c2,
            'alfa': self.alfa,
            'beta': self.beta,
            'beta_traco': self.beta_traco,
            'limite_inferior_beta': self.limite_inferior_beta,
            'desigualdade_beta': self.desigualdade_beta,
            'raio': self.raio,
            'direcoes': self.direcoes,
        }


def constantes_teorema_radial(m: VariedadeCarta, p=None, raio: float = 20.0, direcoes: int = 8,
                              passo_radial: float = 1e-2, semente: int = 0,
                              auditoria: AuditoriaRadial = None) -> ConstantesRadiais:
    """
    c1 = sup (-Δf)₊, c2 = max(sup Δ²f·f³, 0), α = 3c1/2 + c2/4 e
    β = inf (f³/4)(2Δh - Δ²f) com f = sqrt(1 + r²), h = f⁻³.

    Δf vem do traço de B'B⁻¹ ao longo de geodésicas radiais; Δ²f aplica a
    parte radial do laplaciano (φ'' + Δr φ') a Δf na grade radial; Δh usa
    Δh = 3Δf/f⁴ + 12|∇f|²/f⁵ e o valor pela convenção do traço
    (-3Δf/f⁴ + 12|∇f|²/f⁵) sai em ``beta_traco``.
    """
    if auditoria is not None and not auditoria.nao_positiva:
        raise ErroHipotese('Constantes radiais exigem curvatura radial não positiva em p', modelo=m.nome)
    p = m.exigir_dominio(m.origem if p is None else p)
    n = m.dim
    passo = min(parametro('PASSO_INTEGRACAO'), passo_radial)
    n_passos = max(4, int(np.ceil(raio / passo - 1e-9)))
    passo = raio / n_passos
    g = m.metrica(p)
    amostras = np.einsum('ij,kj->ki', base_ortonormal(g), direcoes_esfera(n, direcoes, semente))
    pontos = np.broadcast_to(p, amostras.shape).copy()
    y0, y_linha0 = par_fundamental(direcoes, n)
    trajetoria = integrar_fluxo(
        m, pontos, amostras, passo, n_passos,
        referencial=referencial_ortonormal(m.metrica(pontos), amostras), y0=y0, y_linha0=y_linha0,
    )
    if np.any(trajetoria.saiu):
        raise ErroDominio(
            f'Grade radial de raio {raio} deixa a carta de {m.nome}',
            tempo_saida=float(np.nanmin(trajetoria.tempo_saida)),
        )

    _, _, b, b_linha = separar_fundamental(trajetoria.y, trajetoria.y_linha)
    r = trajetoria.tempos[0]
    traco = np.full((direcoes, r.size), np.nan)
    traco[:, 1:] = np.trace(np.linalg.solve(np.swapaxes(b[:, 1:], -1, -2), np.swapaxes(b_linha[:, 1:], -1, -2)),
                            axis1=-2, axis2=-1)
    f = np.sqrt(1.0 + r * r)
    laplaciano_f = f ** -3 + (r / f) * traco
    laplaciano_f[:, 0] = float(n)

    derivada = derivada_cinco_pontos(laplaciano_f.T, passo).T
    segunda = segunda_derivada_cinco_pontos(laplaciano_f.T, passo).T
    bilaplaciano = segunda + traco * derivada
    gradiente2 = (r / f) ** 2
    laplaciano_h = 3.0 * laplaciano_f / f ** 4 + 12.0 * gradiente2 / f ** 5
    laplaciano_h_traco = -3.0 * laplaciano_f / f ** 4 + 12.0 * gradiente2 / f ** 5

    c1 = max(float(np.max(-laplaciano_f)), 0.0)
    c2 = max(float(np.nanmax(bilaplaciano * f ** 3)), 0.0)
    constantes = ConstantesRadiais(
        c1=c1,
        c2=c2,
        alfa=1.5 * c1 + 0.25 * c2,
        beta=float(np.nanmin(f ** 3 / 4.0 * (2.0 * laplaciano_h - bilaplaciano))),
        beta_traco=float(np.nanmin(f ** 3 / 4.0 * (2.0 * laplaciano_h_traco - bilaplaciano))),
        raio=float(raio),
        direcoes=direcoes,
        perfil={
            'r': r,
            'laplaciano_f': np.mean(laplaciano_f, axis=0),
            'bilaplaciano_f': np.mean(bilaplaciano, axis=0),
        },
    )
    logger.info(
        f"Constantes radiais | Modelo: {m.nome} | c1: {c1:.3e} | c2: {c2:.3e} | β: {constantes.beta:.3e}",
        extra={'modelo': m.nome, **{k: v for k, v in constantes.como_dict().items() if k != 'desigualdade_beta'}},
    )
    return constantes
