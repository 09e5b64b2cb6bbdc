"""
Funções esféricas, densidade de Plancherel |c(λ)|⁻² e a faixa essencial do
operador de multiplicação m(λ) = λ² + h²/4.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, special

from core.excecoes import ErroAjuste, ErroModeloNaoSuportado, ErroPrecondicao
from core.numerica import derivada_cinco_pontos
from core.relatorios import escrever_csv
from variedades.geometria import laplaciano_diferencas
from variedades.modelos import VariedadeCarta

logger = logging.getLogger('laboratorio.espectral')

RAIO_INICIAL_SERIE = 1e-3
PASSO_RESIDUO = 1e-3
RAIO_MINIMO_RESIDUO = 0.05
FOLGA_VAZIO = 1e-12


# Funções esféricas

def _derivada_log_area(densidade: Callable, r: np.ndarray) -> np.ndarray:
    """A'/A por diferença central do logaritmo da densidade de área"""
    r = np.asarray(r, dtype=float)
    delta = 1e-6 * np.maximum(1.0, r)
    return (np.log(densidade(r + delta)) - np.log(densidade(r - delta))) / (2.0 * delta)


@dataclass
class PerfilEsferico:
    """φ_λ em [0, r_max] com φ(0) = 1, φ'(0) = 0 e -φ'' - (A'/A)φ' = (λ² + h²/4)φ"""

    frequencia: float
    h: float
    dimensao: int
    r: np.ndarray
    valores: np.ndarray
    derivadas: np.ndarray
    residuo: float
    solucao: Callable = field(repr=False, default=None)

    @property
    def autovalor(self) -> float:
        return self.frequencia ** 2 + self.h ** 2 / 4.0

    def _serie(self, r: np.ndarray) -> np.ndarray:
        mu, n = self.autovalor, self.dimensao
        return 1.0 - mu * r ** 2 / (2.0 * n) + mu ** 2 * r ** 4 / (8.0 * n * (n + 2))

    def avaliar(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if np.any(r > self.r[-1] * (1.0 + 1e-6)):
            raise ErroPrecondicao('Raio além do perfil esférico', r_max=float(self.r[-1]))
        proximos = r < RAIO_INICIAL_SERIE
        integrados = np.clip(r, RAIO_INICIAL_SERIE, self.r[-1])
        return np.where(proximos, self._serie(r), self.solucao(integrados)[0])

    def como_dict(self) -> Dict:
        return {
            'frequencia': self.frequencia,
            'h': self.h,
            'autovalor': self.autovalor,
            'residuo': self.residuo,
            'r_max': float(self.r[-1]),
        }

    def exportar_csv(self, caminho: Path) -> Path:
        return escrever_csv(caminho, ['r', 'phi', 'dphi'], zip(self.r, self.valores, self.derivadas))


def funcao_esferica(m: VariedadeCarta, frequencia: float, r_max: float = 10.0, pontos: int = 1001,
                    h: float = None) -> PerfilEsferico:
    """
    Resolve a EDO radial com partida em série no ponto singular regular r = 0
    (DOP853). O resíduo da relação de autovalor usa φ'' por diferenças de
    quarta ordem de φ' em passo 1e-3 sobre [0.05, r_max].
    """
    densidade = m.oraculos.densidade_area
    if not m.bandeiras.harmonica or densidade is None:
        raise ErroModeloNaoSuportado(f'Funções esféricas exigem modelo harmônico com densidade radial: {m.nome}')
    h = m.bandeiras.h_assintotico if h is None else h
    if h is None:
        raise ErroModeloNaoSuportado(f'h indefinido para {m.nome}', modelo=m.nome)
    if frequencia < 0.0 or r_max <= RAIO_INICIAL_SERIE:
        raise ErroPrecondicao('Frequência não negativa e r_max positivo são obrigatórios')
    n = m.dim
    mu = frequencia ** 2 + h ** 2 / 4.0

    def campo(r, estado):
        phi, dphi = estado
        return [dphi, -_derivada_log_area(densidade, r) * dphi - mu * phi]

    r0 = RAIO_INICIAL_SERIE
    inicio = [
        1.0 - mu * r0 ** 2 / (2.0 * n) + mu ** 2 * r0 ** 4 / (8.0 * n * (n + 2)),
        -mu * r0 / n + mu ** 2 * r0 ** 3 / (2.0 * n * (n + 2)),
    ]
    solucao = integrate.solve_ivp(campo, (r0, r_max), inicio, method='DOP853', rtol=1e-13, atol=1e-15,
                                  dense_output=True)
    if not solucao.success:
        raise ErroPrecondicao(f'Integração da função esférica falhou: {solucao.message}')

    # resíduo de -φ'' - (A'/A)φ' - μφ
    malha = np.arange(RAIO_MINIMO_RESIDUO, r_max + 0.5 * PASSO_RESIDUO, PASSO_RESIDUO)
    phi, dphi = solucao.sol(malha)
    segunda = derivada_cinco_pontos(dphi, PASSO_RESIDUO)
    residuos = -segunda - _derivada_log_area(densidade, malha) * dphi - mu * phi
    residuo = float(np.nanmax(np.abs(residuos)))

    r = np.linspace(0.0, r_max, pontos)
    internos = r >= r0
    valores = np.ones_like(r)
    derivadas = np.zeros_like(r)
    valores[internos], derivadas[internos] = solucao.sol(r[internos])
    valores[~internos] = 1.0 - mu * r[~internos] ** 2 / (2.0 * n)
    derivadas[~internos] = -mu * r[~internos] / n

    perfil = PerfilEsferico(
        frequencia=float(frequencia), h=float(h), dimensao=n, r=r, valores=valores, derivadas=derivadas,
        residuo=residuo, solucao=solucao.sol,
    )
    logger.info(
        f"Função esférica | Modelo: {m.nome} | λ: {frequencia:g} | Resíduo: {residuo:.3e}",
        extra={'modelo': m.nome, 'frequencia': frequencia, 'residuo': residuo},
    )
    return perfil


def verificar_relacao_autovalor(m: VariedadeCarta, perfil: PerfilEsferico, pontos: np.ndarray,
                                passo: float = 1e-2) -> np.ndarray:
    """-Δ(φ∘d_o)/(φ∘d_o) nos pontos, com laplaciano covariante por diferenças"""
    distancia = m.oraculos.distancia
    if distancia is None:
        raise ErroModeloNaoSuportado(f'Verificação da relação de autovalor exige oráculo de distância: {m.nome}')
    o = m.origem

    def composta(x):
        return float(perfil.avaliar(distancia(o, x)))

    pontos = np.atleast_2d(np.asarray(pontos, dtype=float))
    return np.array([-laplaciano_diferencas(m, composta, x, passo) / composta(x) for x in pontos])


# Densidade de Plancherel

def inverso_funcao_c(dimensao: int, lambdas) -> np.ndarray:
    """
    |c(λ)|⁻¹ do espaço hiperbólico real H^n:
    c(λ) = Γ(n/2)/Γ(1/2) · Γ(iλ)/Γ(iλ + ρ), ρ = (n-1)/2.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    rho = (dimensao - 1) / 2.0
    positivos = lambdas > 0.0
    seguros = np.where(positivos, lambdas, 1.0)
    logaritmo = (
        np.real(special.loggamma(1j * seguros + rho)) - np.real(special.loggamma(1j * seguros))
        + special.gammaln(0.5) - special.gammaln(dimensao / 2.0)
    )
    return np.where(positivos, np.exp(logaritmo), 0.0)


@dataclass
class DensidadePlancherel:
    """C₀|c(λ)|⁻² numa grade de λ com as constantes C, K das cotas inferiores"""

    h: float
    dimensao: int
    lambdas: np.ndarray
    densidade: np.ndarray
    constante_C: float
    constante_K: float
    C0: float = 1.0

    def avaliar(self, lambdas) -> np.ndarray:
        return self.C0 * inverso_funcao_c(self.dimensao, lambdas) ** 2

    @property
    def razao_quadratica(self) -> Tuple[float, float]:
        """Mínimo e máximo de densidade/λ² em (0, K]"""
        pequenos = (self.lambdas > 0.0) & (self.lambdas <= self.constante_K)
        razoes = self.densidade[pequenos] / self.lambdas[pequenos] ** 2
        return float(np.min(razoes)), float(np.max(razoes))

    def limites_verificados(self) -> bool:
        """(1/C)λ ≤ |c|⁻¹ em [0, K) e (1/C)λ^{(n-1)/2} ≤ |c|⁻¹ em [K, ∞) na grade"""
        inverso = inverso_funcao_c(self.dimensao, self.lambdas)
        cota = np.where(
            self.lambdas < self.constante_K,
            self.lambdas,
            self.lambdas ** ((self.dimensao - 1) / 2.0),
        ) / self.constante_C
        return bool(np.all(cota <= inverso * (1.0 + 1e-12)))

    def como_dict(self) -> Dict:
        return {
            'h': self.h,
            'dimensao': self.dimensao,
            'C0': self.C0,
            'C': self.constante_C,
            'K': self.constante_K,
            'razao_quadratica': self.razao_quadratica,
            'limites_verificados': self.limites_verificados(),
        }

    def exportar_csv(self, caminho: Path) -> Path:
        return escrever_csv(caminho, ['lambda', 'densidade'], zip(self.lambdas, self.densidade))


def densidade_funcao_c(dimensao: int, lambdas: Sequence[float]) -> DensidadePlancherel:
    """
    Densidade na grade e ajuste de (C, K): para cada K candidato da grade,
    C(K) é o menor C que satisfaz as duas cotas; fica o K de menor C.
    """
    if dimensao < 2:
        raise ErroPrecondicao('A função c exige n >= 2', dimensao=dimensao)
    lambdas = np.asarray(sorted(float(valor) for valor in lambdas))
    if lambdas.size == 0 or lambdas[0] < 0.0:
        raise ErroPrecondicao('A grade de λ deve ser não vazia e não negativa')
    inverso = inverso_funcao_c(dimensao, lambdas)
    positivos = lambdas > 0.0
    with np.errstate(divide='ignore', invalid='ignore'):
        razao_pequena = np.where(positivos, lambdas / inverso, np.nan)
        razao_grande = np.where(positivos, lambdas ** ((dimensao - 1) / 2.0) / inverso, np.nan)

    melhor_C, melhor_K = np.inf, np.nan
    for K in lambdas[positivos]:
        pequenos = positivos & (lambdas < K)
        grandes = positivos & (lambdas >= K)
        C = max(
            float(np.max(razao_pequena[pequenos])) if np.any(pequenos) else 0.0,
            float(np.max(razao_grande[grandes])) if np.any(grandes) else 0.0,
        )
        if np.isfinite(C) and C < melhor_C * (1.0 - 1e-12):
            melhor_C, melhor_K = C, float(K)
    if not np.isfinite(melhor_C) or melhor_C <= 0.0:
        raise ErroAjuste('Nenhum par (C, K) satisfaz as cotas de |c(λ)|⁻¹ na grade', dimensao=dimensao)

    densidade = DensidadePlancherel(
        h=float(dimensao - 1),
        dimensao=dimensao,
        lambdas=lambdas,
        densidade=inverso ** 2,
        constante_C=melhor_C,
        constante_K=melhor_K,
    )
    logger.info(
        f"Densidade de Plancherel | n: {dimensao} | C: {melhor_C:.6g} | K: {melhor_K:.6g}",
        extra={'dimensao': dimensao, 'C': melhor_C, 'K': melhor_K},
    )
    return densidade


# Faixa essencial

@dataclass
class VereditoFaixa:
    x: float
    epsilon: float
    intervalo: Optional[Tuple[float, float]]
    medida: float
    intervalo_forca_bruta: Optional[Tuple[float, float]]
    medida_forca_bruta: float
    celula: float

    @property
    def incluido(self) -> bool:
        return self.medida > 0.0

    @property
    def incluido_forca_bruta(self) -> bool:
        return self.medida_forca_bruta > 0.0

    @property
    def concorda(self) -> bool:
        if self.incluido != self.incluido_forca_bruta:
            return False
        if not self.incluido:
            return True
        (a, b), (a_bruto, b_bruto) = self.intervalo, self.intervalo_forca_bruta
        return abs(a - a_bruto) <= self.celula + 1e-12 and abs(b - b_bruto) <= self.celula + 1e-12

    def como_dict(self) -> Dict:
        return {
            'x': self.x,
            'epsilon': self.epsilon,
            'incluido': self.incluido,
            'intervalo': self.intervalo,
            'medida': self.medida,
            'incluido_forca_bruta': self.incluido_forca_bruta,
            'intervalo_forca_bruta': self.intervalo_forca_bruta,
            'concorda': self.concorda,
        }


@dataclass
class ResultadoFaixaEssencial:
    fundo: float
    vereditos: List[VereditoFaixa]

    @property
    def concordancia(self) -> bool:
        return all(veredito.concorda for veredito in self.vereditos)

    @property
    def fundo_correto(self) -> bool:
        """Todo x ≥ h²/4 incluído e todo x < h²/4 excluído pela testemunha ε = h²/4 - x"""
        for veredito in self.vereditos:
            if veredito.x >= self.fundo and not veredito.incluido:
                return False
        return all(not veredito.incluido for veredito in self.vereditos
                   if veredito.x < self.fundo and veredito.epsilon <= testemunha_exclusao(self.fundo, veredito.x))

    def como_dict(self) -> Dict:
        return {
            'fundo': self.fundo,
            'concordancia': self.concordancia,
            'fundo_correto': self.fundo_correto,
            'vereditos': [veredito.como_dict() for veredito in self.vereditos],
        }

    def exportar_csv(self, caminho: Path) -> Path:
        return escrever_csv(
            caminho, ['x', 'epsilon', 'incluido', 'medida', 'incluido_forca_bruta', 'concorda'],
            ([v.x, v.epsilon, v.incluido, v.medida, v.incluido_forca_bruta, v.concorda] for v in self.vereditos),
        )


def testemunha_exclusao(fundo: float, x: float) -> float:
    """ε = h²/4 - x torna m⁻¹(x - ε, x + ε) vazio para x abaixo do fundo"""
    return fundo - x


def _preimagem(fundo: float, x: float, epsilon: float) -> Optional[Tuple[float, float]]:
    """m⁻¹(x - ε, x + ε) ∩ [0, ∞) em forma fechada"""
    superior = (x - fundo) + epsilon
    if superior <= FOLGA_VAZIO * max(1.0, abs(x)):
        return None
    inferior = (x - fundo) - epsilon
    return float(np.sqrt(max(inferior, 0.0))), float(np.sqrt(superior))


def faixa_essencial(h: float, densidade: DensidadePlancherel, x_grade: Sequence[float],
                    epsilons: Sequence[float], passo_forca_bruta: float = 1e-4,
                    lambda_maximo: float = 20.0) -> ResultadoFaixaEssencial:
    """
    Para cada (x, ε): medida da pré-imagem sob a densidade e o mesmo veredito
    por varredura das células da grade [0, lambda_maximo] de passo
    ``passo_forca_bruta``. Uma célula conta quando min |m - x| nela é < ε.
    """
    fundo = h * h / 4.0
    grade = np.arange(0.0, lambda_maximo + 0.5 * passo_forca_bruta, passo_forca_bruta)
    m_esquerda, m_direita = grade[:-1] ** 2 + fundo, grade[1:] ** 2 + fundo
    densidade_grade = densidade.avaliar(grade)
    massa_celulas = 0.5 * (densidade_grade[:-1] + densidade_grade[1:]) * passo_forca_bruta

    vereditos = []
    for x in x_grade:
        for epsilon in epsilons:
            x, epsilon = float(x), float(epsilon)
            if epsilon <= 0.0:
                raise ErroPrecondicao('ε deve ser positivo', epsilon=epsilon)
            intervalo = _preimagem(fundo, x, epsilon)
            medida = 0.0
            if intervalo is not None:
                a, b = intervalo[0], min(intervalo[1], lambda_maximo)
                nos = np.linspace(a, b, 129)
                medida = float(integrate.simpson(densidade.avaliar(nos), x=nos))

            contem = (m_esquerda <= x) & (x <= m_direita)
            distancia = np.where(contem, 0.0, np.minimum(np.abs(m_esquerda - x), np.abs(m_direita - x)))
            marcadas = np.flatnonzero(distancia < epsilon - FOLGA_VAZIO * max(1.0, abs(x)))
            intervalo_bruto = None
            medida_bruta = 0.0
            if marcadas.size:
                intervalo_bruto = (float(grade[marcadas[0]]), float(grade[marcadas[-1] + 1]))
                medida_bruta = float(np.sum(massa_celulas[marcadas]))
            if intervalo is not None:
                intervalo = (intervalo[0], min(intervalo[1], lambda_maximo))
            vereditos.append(VereditoFaixa(
                x=x, epsilon=epsilon, intervalo=intervalo, medida=medida,
                intervalo_forca_bruta=intervalo_bruto, medida_forca_bruta=medida_bruta,
                celula=passo_forca_bruta,
            ))

    resultado = ResultadoFaixaEssencial(fundo=fundo, vereditos=vereditos)
    logger.info(
        f"Faixa essencial | h: {h:g} | Fundo: {fundo:.6g} | Pares: {len(vereditos)} | "
        f"Concordância: {resultado.concordancia}",
        extra={'h': h, 'fundo': fundo, 'pares': len(vereditos), 'concordancia': resultado.concordancia},
    )
    return resultado
