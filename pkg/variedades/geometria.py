"""
Conexão de Levi-Civita e curvatura a partir das derivadas da métrica.

Convenções:
    Γ[..., k, i, j] = Γ^k_ij
    R^l_ijk = ∂_i Γ^l_jk - ∂_j Γ^l_ik + Γ^l_im Γ^m_jk - Γ^l_jm Γ^m_ik
    Rlow[..., a, i, j, k] = g_al R^l_ijk, de modo que
    K(X, Y) = Rlow(X, X, Y, Y) / (|X|²|Y|² - <X, Y>²).
A matriz de curvatura ao longo de v num referencial E tem entradas
<R(e_i, v) v, e_j>; para curvatura constante κ vale κ·Id.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import linalg

from core.excecoes import ErroPrecondicao

from .modelos import VariedadeCarta

logger = logging.getLogger('laboratorio.variedades')


def _tensor_koszul(dg: np.ndarray) -> np.ndarray:
    """T[l, i, j] = ∂_i g_jl + ∂_j g_il - ∂_l g_ij"""
    return (
        np.einsum('...jli->...lij', dg)
        + np.einsum('...ilj->...lij', dg)
        - np.einsum('...ijl->...lij', dg)
    )


def christoffel_de_derivadas(g: np.ndarray, dg: np.ndarray) -> np.ndarray:
    ginv = np.linalg.inv(g)
    return 0.5 * np.einsum('...kl,...lij->...kij', ginv, _tensor_koszul(dg), optimize=False)


def simbolos_christoffel(m: VariedadeCarta, x: np.ndarray) -> np.ndarray:
    """Símbolos de Christoffel Γ^k_ij em x (vetorizado sobre eixos iniciais)"""
    x = m.exigir_dominio(x)
    return christoffel_de_derivadas(m.metrica(x), m.derivadas_metrica(x))


def christoffel_e_derivadas(m: VariedadeCarta, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Retorna (g, Γ, ∂Γ) com ∂Γ[..., k, i, j, m] = ∂_m Γ^k_ij. Não valida o
    domínio: uso interno dos integradores, que tratam saídas da carta.
    """
    g = m.metrica(x)
    dg = m.derivadas_metrica(x)
    d2g = m.segundas_derivadas_metrica(x)
    ginv = np.linalg.inv(g)
    koszul = _tensor_koszul(dg)
    dkoszul = (
        np.einsum('...jlim->...lijm', d2g)
        + np.einsum('...iljm->...lijm', d2g)
        - np.einsum('...ijlm->...lijm', d2g)
    )
    dginv = -np.einsum('...ka,...abm,...bl->...klm', ginv, dg, ginv, optimize=False)
    gamma = 0.5 * np.einsum('...kl,...lij->...kij', ginv, koszul, optimize=False)
    dgamma = 0.5 * (
        np.einsum('...klm,...lij->...kijm', dginv, koszul, optimize=False)
        + np.einsum('...kl,...lijm->...kijm', ginv, dkoszul, optimize=False)
    )
    return g, gamma, dgamma


def conexao_e_curvatura(m: VariedadeCarta, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(g, Γ, Rlow) com Rlow[..., a, i, j, k] = g_al R^l_ijk; sem validação de domínio"""
    g, gamma, dgamma = christoffel_e_derivadas(m, x)
    rup = (
        np.einsum('...ljki->...lijk', dgamma)
        - np.einsum('...likj->...lijk', dgamma)
        + np.einsum('...lim,...mjk->...lijk', gamma, gamma, optimize=False)
        - np.einsum('...ljm,...mik->...lijk', gamma, gamma, optimize=False)
    )
    return g, gamma, np.einsum('...al,...lijk->...aijk', g, rup, optimize=False)


def tensor_curvatura(m: VariedadeCarta, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(g, Rlow)"""
    g, _, rlow = conexao_e_curvatura(m, x)
    return g, rlow


def matriz_curvatura(rlow: np.ndarray, referencial: np.ndarray, v: np.ndarray) -> np.ndarray:
    """M[i, j] = <R(e_i, v) v, e_j> para as colunas e_i de ``referencial``"""
    return np.einsum('...abcd,...aj,...bi,...c,...d->...ij', rlow, referencial, referencial, v, v, optimize=False)


# Referenciais ortonormais

def base_ortonormal(g: np.ndarray) -> np.ndarray:
    """Colunas ortonormais para g: L^{-T} com g = L Lᵀ"""
    fator = np.linalg.cholesky(g)
    return np.swapaxes(np.linalg.inv(fator), -1, -2)


def referencial_ortonormal(g: np.ndarray, v: np.ndarray) -> np.ndarray:
    """
    Completa o vetor unitário v a uma base g-ortonormal e devolve as n-1
    colunas ortogonais a v (forma (..., n, n-1)). Sinais fixados pela
    diagonal positiva do fator R, o que torna o resultado determinístico.
    """
    fator = np.linalg.cholesky(g)
    inversa_t = np.swapaxes(np.linalg.inv(fator), -1, -2)
    # coordenadas ortonormais de v: Lᵀ v
    v_orto = np.einsum('...ji,...j->...i', fator, v)
    n = g.shape[-1]
    # completa com os n-1 eixos canônicos em que v tem as menores componentes
    ordem = np.argsort(np.abs(v_orto), axis=-1, kind='stable')
    canonica = np.take_along_axis(np.broadcast_to(np.eye(n), g.shape), ordem[..., None, :], axis=-1)
    matriz = np.concatenate([v_orto[..., :, None], canonica[..., :, : n - 1]], axis=-1)
    q, r = np.linalg.qr(matriz)
    sinais = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
    sinais = np.where(sinais == 0, 1.0, sinais)
    q = q * sinais[..., None, :]
    return np.einsum('...ij,...jk->...ik', inversa_t, q[..., :, 1:])


def verificar_referencial(g: np.ndarray, v: np.ndarray, referencial: np.ndarray, tolerancia: float = 1e-8) -> float:
    """Desvio máximo de [v | E] em relação a uma base g-ortonormal"""
    completo = np.concatenate([v[..., :, None], referencial], axis=-1)
    gram = np.einsum('...ai,...ab,...bj->...ij', completo, g, completo)
    desvio = float(np.max(np.abs(gram - np.eye(gram.shape[-1]))))
    if desvio > tolerancia:
        raise ErroPrecondicao('Referencial não ortonormal ou não ortogonal à direção', desvio=desvio)
    return desvio


def autovalores_metricos(hessiano: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Autovalores generalizados de uma forma bilinear coordenada em relação a g"""
    return linalg.eigh(0.5 * (hessiano + hessiano.T), g, eigvals_only=True)


# Operações públicas

@dataclass(frozen=True)
class OperadorCurvatura:
    """R(t)w = R(w, v)v restrito a v⊥ no referencial dado"""

    base: np.ndarray
    direcao: np.ndarray
    referencial: np.ndarray
    matriz: np.ndarray

    @property
    def assimetria(self) -> float:
        escala = max(1.0, float(np.max(np.abs(self.matriz))))
        return float(np.max(np.abs(self.matriz - self.matriz.T))) / escala


def operador_curvatura(m: VariedadeCarta, p, v, referencial) -> OperadorCurvatura:
    """Matriz <R(e_i, v) v, e_j> para um referencial ortonormal de v⊥"""
    p = m.exigir_dominio(p)
    v = np.asarray(v, dtype=float)
    referencial = np.asarray(referencial, dtype=float)
    g, rlow = tensor_curvatura(m, p)
    verificar_referencial(g, v, referencial)
    operador = OperadorCurvatura(p, v, referencial, matriz_curvatura(rlow, referencial, v))
    if operador.assimetria > 1e-8:
        logger.warning(
            f"Operador de curvatura assimétrico | Modelo: {m.nome} | Assimetria: {operador.assimetria:.3e}",
            extra={'modelo': m.nome, 'assimetria': operador.assimetria},
        )
    return operador


def curvatura_seccional(m: VariedadeCarta, p, u, w) -> float:
    """K(u, w) do plano gerado por u e w"""
    p = m.exigir_dominio(p)
    u, w = np.asarray(u, dtype=float), np.asarray(w, dtype=float)
    g, rlow = tensor_curvatura(m, p)
    uu, ww, uw = u @ g @ u, w @ g @ w, u @ g @ w
    area = uu * ww - uw ** 2
    if area <= 1e-12 * uu * ww:
        raise ErroPrecondicao('Plano degenerado: u e w são paralelos')
    return float(np.einsum('abcd,a,b,c,d->', rlow, u, u, w, w) / area)


def curvatura_ricci(m: VariedadeCarta, p, u, referencial: Optional[np.ndarray] = None) -> float:
    """Ric(u, u) como traço do operador de curvatura sobre u⊥"""
    p = m.exigir_dominio(p)
    u = m.exigir_unitario(p, u)
    g = m.metrica(p)
    if referencial is None:
        referencial = referencial_ortonormal(g, u)
    return float(np.trace(operador_curvatura(m, p, u, referencial).matriz))


def verificar_independencia_referencial(m: VariedadeCarta, p, u, quantidade: int = 5,
                                        gerador: np.random.Generator = None) -> float:
    """Maior desvio de Ric(u) entre referenciais ortonormais aleatórios de u⊥"""
    gerador = gerador or np.random.default_rng(0)
    p = m.exigir_dominio(p)
    g = m.metrica(p)
    base = referencial_ortonormal(g, u)
    valores = []
    for _ in range(quantidade):
        rotacao, _ = np.linalg.qr(gerador.standard_normal((m.dim - 1, m.dim - 1)))
        valores.append(curvatura_ricci(m, p, u, base @ rotacao))
    return float(np.max(valores) - np.min(valores))


def verificar_derivadas(m: VariedadeCarta, pontos: np.ndarray) -> float:
    """
    Maior desvio relativo entre ∂g analítico e diferenças centrais com passo
    1e-5 escalado pela magnitude da coordenada.
    """
    from .modelos import _diferencas_centrais

    pontos = m.exigir_dominio(pontos)
    analitico = m.derivadas_metrica(pontos)
    numerico = _diferencas_centrais(m.metrica, pontos, 1e-5)
    escala = np.maximum(1.0, np.max(np.abs(analitico), axis=tuple(range(1, analitico.ndim)), keepdims=True))
    return float(np.max(np.abs(analitico - numerico) / escala))


def verificar_definida_positiva(m: VariedadeCarta, pontos: np.ndarray) -> float:
    """Menor autovalor da métrica nos pontos (deve ser positivo)"""
    pontos = m.exigir_dominio(pontos)
    return float(np.min(np.linalg.eigvalsh(m.metrica(pontos))))


def laplaciano_diferencas(m: VariedadeCarta, funcao, x: np.ndarray, passo: float) -> float:
    """
    Laplaciano covariante g^{ij}(∂_ij f - Γ^k_ij ∂_k f) com diferenças
    centrais de quarta ordem em coordenadas.
    """
    x = m.exigir_dominio(x)
    n = m.dim
    base = np.eye(n) * passo
    centro = funcao(x)
    gradiente = np.zeros(n)
    hessiano = np.zeros((n, n))
    for i in range(n):
        f1, f_1 = funcao(x + base[i]), funcao(x - base[i])
        f2, f_2 = funcao(x + 2 * base[i]), funcao(x - 2 * base[i])
        gradiente[i] = (-f2 + 8 * f1 - 8 * f_1 + f_2) / (12 * passo)
        hessiano[i, i] = (-f2 + 16 * f1 - 30 * centro + 16 * f_1 - f_2) / (12 * passo ** 2)
        for j in range(i + 1, n):
            def cruzado(h):
                return (
                    funcao(x + h * (base[i] + base[j]) / passo) - funcao(x + h * (base[i] - base[j]) / passo)
                    - funcao(x + h * (base[j] - base[i]) / passo) + funcao(x - h * (base[i] + base[j]) / passo)
                ) / (4 * h ** 2)
            valor = (4 * cruzado(passo) - cruzado(2 * passo)) / 3
            hessiano[i, j] = hessiano[j, i] = valor
    g = m.metrica(x)
    gamma = simbolos_christoffel(m, x)
    ginv = np.linalg.inv(g)
    return float(np.einsum('ij,ij->', ginv, hessiano) - np.einsum('ij,kij,k->', ginv, gamma, gradiente))
