"""
Integradores em lote (RK4 de passo fixo) usados por todo o laboratório.

Três fluxos compartilham o mesmo laço:
    - geodésico: (x, u);
    - referencial + Jacobi: (x, u, E, Y, Y') com Y'' = -M(t) Y no referencial
      paralelo E, M = <R(e_i, γ') γ', e_j>;
    - linearizado: (x, u, X, U) com X(1) = ∂exp_p(w)/∂w, usado pelo tiro de Newton.

A primeira dimensão é o lote B. Linhas que deixam o domínio da carta são
congeladas no último estado válido, marcadas e recebem NaN nos registros
seguintes.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from core.configuracao import parametro
from core.numerica import passo_rk4
from variedades.geometria import christoffel_de_derivadas, christoffel_e_derivadas, conexao_e_curvatura, matriz_curvatura
from variedades.modelos import VariedadeCarta

logger = logging.getLogger('laboratorio.geodesicas')


@dataclass
class TrajetoriaLote:
    """Registros de um fluxo em lote; tempos (B, R) e estados (B, R, ...)"""

    tempos: np.ndarray
    x: np.ndarray
    u: np.ndarray
    referencial: Optional[np.ndarray]
    y: Optional[np.ndarray]
    y_linha: Optional[np.ndarray]
    saiu: np.ndarray
    tempo_saida: np.ndarray

    def estado_final(self):
        """(x, u, E, Y, Y') do último registro, NaN em linhas que saíram"""
        pegar = lambda arr: None if arr is None else arr[:, -1]
        return pegar(self.x), pegar(self.u), pegar(self.referencial), pegar(self.y), pegar(self.y_linha)


def _campo_geodesico(m: VariedadeCarta):
    def campo(estado):
        x, u = estado
        gamma = christoffel_de_derivadas(m.metrica(x), m.derivadas_metrica(x))
        return u, -np.einsum('...kij,...i,...j->...k', gamma, u, u, optimize=False)

    return campo


def _campo_jacobi(m: VariedadeCarta, com_jacobi: bool):
    def campo(estado):
        x, u, referencial = estado[:3]
        _, gamma, rlow = conexao_e_curvatura(m, x)
        du = -np.einsum('...kij,...i,...j->...k', gamma, u, u, optimize=False)
        dref = -np.einsum('...kij,...i,...jc->...kc', gamma, u, referencial, optimize=False)
        if not com_jacobi:
            return u, du, dref
        y, y_linha = estado[3:]
        curvatura = matriz_curvatura(rlow, referencial, u)
        return u, du, dref, y_linha, -np.einsum('...ij,...jc->...ic', curvatura, y, optimize=False)

    return campo


def integrar_fluxo(m: VariedadeCarta, x0: np.ndarray, u0: np.ndarray, passo, n_passos: int,
                   registrar_cada: int = 1, referencial: np.ndarray = None, y0: np.ndarray = None,
                   y_linha0: np.ndarray = None, t0=0.0) -> TrajetoriaLote:
    """
    Integra n_passos de RK4 a partir de (x0, u0) em lote.

    ``passo`` é escalar ou (B,) (cada linha chega a t0 + n_passos·passo_b).
    Com ``referencial`` transporta E paralelamente; com ``y0``/``y_linha0``
    integra também o tensor de Jacobi no referencial.
    """
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    u0 = np.atleast_2d(np.asarray(u0, dtype=float))
    lote = x0.shape[0]
    passo = np.broadcast_to(np.asarray(passo, dtype=float), (lote,)).copy()
    t0 = np.broadcast_to(np.asarray(t0, dtype=float), (lote,)).copy()
    com_referencial = referencial is not None
    com_jacobi = y0 is not None
    if com_jacobi and not com_referencial:
        raise ValueError('O tensor de Jacobi exige o referencial paralelo')

    estado = [x0, u0]
    if com_referencial:
        estado.append(np.asarray(referencial, dtype=float))
    if com_jacobi:
        estado += [np.asarray(y0, dtype=float), np.asarray(y_linha0, dtype=float)]
    estado = tuple(estado)
    campo = _campo_jacobi(m, com_jacobi) if com_referencial else _campo_geodesico(m)

    indices = list(range(0, n_passos + 1, registrar_cada))
    if indices[-1] != n_passos:
        indices.append(n_passos)
    registros = [np.full((lote, len(indices)) + componente.shape[1:], np.nan) for componente in estado]
    tempos = t0[:, None] + passo[:, None] * np.asarray(indices, dtype=float)[None, :]

    saiu = ~m.no_dominio(x0)
    tempo_saida = np.where(saiu, t0, np.nan)
    proximo = 0
    with np.errstate(all='ignore'):
        for k in range(n_passos + 1):
            if k == indices[proximo]:
                for registro, componente in zip(registros, estado):
                    registro[:, proximo] = componente
                    registro[saiu, proximo] = np.nan
                proximo += 1
            if k == n_passos:
                break
            novo = passo_rk4(campo, estado, passo)
            valido = m.no_dominio(novo[0]) & ~saiu
            for componente in novo[1:]:
                valido &= np.all(np.isfinite(componente.reshape(lote, -1)), axis=1)
            recem_saidas = ~valido & ~saiu
            if np.any(recem_saidas):
                tempo_saida[recem_saidas] = t0[recem_saidas] + k * passo[recem_saidas]
                saiu = saiu | recem_saidas
                logger.debug(
                    f"Trajetória deixou o domínio | Modelo: {m.nome} | Linhas: {int(recem_saidas.sum())}",
                    extra={'modelo': m.nome, 'linhas': int(recem_saidas.sum())},
                )
            estado = tuple(np.where(_expandir(valido, velho), novo_c, velho)
                           for novo_c, velho in zip(novo, estado))

    return TrajetoriaLote(
        tempos=tempos,
        x=registros[0],
        u=registros[1],
        referencial=registros[2] if com_referencial else None,
        y=registros[3] if com_jacobi else None,
        y_linha=registros[4] if com_jacobi else None,
        saiu=saiu,
        tempo_saida=tempo_saida,
    )


def _expandir(mascara: np.ndarray, alvo: np.ndarray) -> np.ndarray:
    return mascara.reshape(mascara.shape + (1,) * (alvo.ndim - 1))


def par_fundamental(lote: int, n: int):
    """Y(0) = [Id | 0], Y'(0) = [0 | Id]: colunas A (n-1) e B (n-1)"""
    identidade = np.eye(n - 1)
    zeros = np.zeros((n - 1, n - 1))
    y0 = np.broadcast_to(np.concatenate([identidade, zeros], axis=1), (lote, n - 1, 2 * (n - 1))).copy()
    y_linha0 = np.broadcast_to(np.concatenate([zeros, identidade], axis=1), (lote, n - 1, 2 * (n - 1))).copy()
    return y0, y_linha0


def separar_fundamental(y: np.ndarray, y_linha: np.ndarray):
    """(A, A', B, B') a partir das colunas do par fundamental"""
    k = y.shape[-1] // 2
    return y[..., :k], y_linha[..., :k], y[..., k:], y_linha[..., k:]


# Fluxo linearizado para o tiro

def _campo_linearizado(m: VariedadeCarta):
    def campo(estado):
        x, u, variacao, variacao_linha = estado
        _, gamma, dgamma = christoffel_e_derivadas(m, x)
        du = -np.einsum('...kij,...i,...j->...k', gamma, u, u, optimize=False)
        dvar_linha = (
            -np.einsum('...kijm,...i,...j,...mc->...kc', dgamma, u, u, variacao, optimize=False)
            - 2.0 * np.einsum('...kij,...i,...jc->...kc', gamma, u, variacao_linha, optimize=False)
        )
        return u, du, variacao_linha, dvar_linha

    return campo


def exponencial_linearizada(m: VariedadeCarta, p: np.ndarray, w: np.ndarray, n_passos: int):
    """
    exp_p(w) e sua derivada ∂exp_p(w)/∂w em lote, integrando em τ ∈ [0, 1].

    Retorna (x_final, jacobiana, saiu).
    """
    p = np.atleast_2d(np.asarray(p, dtype=float))
    w = np.atleast_2d(np.asarray(w, dtype=float))
    lote, n = p.shape
    estado = (p, w, np.zeros((lote, n, n)), np.broadcast_to(np.eye(n), (lote, n, n)).copy())
    campo = _campo_linearizado(m)
    passo = 1.0 / n_passos
    saiu = ~m.no_dominio(p)
    with np.errstate(all='ignore'):
        for _ in range(n_passos):
            estado = passo_rk4(campo, estado, passo)
            saiu |= ~m.no_dominio(estado[0])
            saiu |= ~np.all(np.isfinite(estado[2].reshape(lote, -1)), axis=1)
    return estado[0], estado[2], saiu


class FluxoSegmentado:
    """
    Lote de geodésicas com referencial e par fundamental avançado por trechos.

    Cada chamada de ``avancar_ate`` leva as linhas pedidas do seu tempo atual
    até o alvo com um número comum de passos, ajustando o passo por linha para
    chegar exatamente no alvo.
    """

    def __init__(self, m: VariedadeCarta, x0: np.ndarray, u0: np.ndarray, referencial: np.ndarray = None,
                 com_jacobi: bool = True, passo: float = None, registros_por_trecho: int = 16):
        self.m = m
        self.passo = float(passo or parametro('PASSO_INTEGRACAO'))
        self.registros_por_trecho = registros_por_trecho
        self.x = np.atleast_2d(np.asarray(x0, dtype=float)).copy()
        self.u = np.atleast_2d(np.asarray(u0, dtype=float)).copy()
        lote, n = self.x.shape
        self.referencial = None
        if referencial is not None:
            self.referencial = np.asarray(referencial, dtype=float).reshape(lote, n, n - 1).copy()
        self.com_jacobi = com_jacobi and referencial is not None
        if self.com_jacobi:
            self.y, self.y_linha = par_fundamental(lote, n)
        else:
            self.y = self.y_linha = None
        self.tempo = np.zeros(lote)
        self.saiu = ~m.no_dominio(self.x)
        self.tempo_saida = np.where(self.saiu, 0.0, np.nan)

    @property
    def lote(self) -> int:
        return self.x.shape[0]

    def avancar_ate(self, alvo, linhas: np.ndarray = None) -> Optional[TrajetoriaLote]:
        """Avança ``linhas`` (todas por padrão) até o tempo ``alvo`` (escalar ou array com uma entrada por linha do lote)"""
        linhas = np.arange(self.lote) if linhas is None else np.asarray(linhas, dtype=int)
        linhas = linhas[~self.saiu[linhas]]
        if linhas.size == 0:
            return None
        alvo = np.broadcast_to(np.asarray(alvo, dtype=float), (self.lote,))[linhas]
        duracao = np.maximum(alvo - self.tempo[linhas], 0.0)
        maior = float(np.max(duracao))
        if maior <= 0.0:
            return None
        n_passos = max(1, int(np.ceil(maior / self.passo - 1e-9)))
        trajetoria = integrar_fluxo(
            self.m, self.x[linhas], self.u[linhas], duracao / n_passos, n_passos,
            registrar_cada=max(1, n_passos // self.registros_por_trecho),
            referencial=None if self.referencial is None else self.referencial[linhas],
            y0=self.y[linhas] if self.com_jacobi else None,
            y_linha0=self.y_linha[linhas] if self.com_jacobi else None,
            t0=self.tempo[linhas],
        )
        validas = ~trajetoria.saiu
        alvo_linhas = linhas[validas]
        self.x[alvo_linhas] = trajetoria.x[validas, -1]
        self.u[alvo_linhas] = trajetoria.u[validas, -1]
        if self.referencial is not None:
            self.referencial[alvo_linhas] = trajetoria.referencial[validas, -1]
        if self.com_jacobi:
            self.y[alvo_linhas] = trajetoria.y[validas, -1]
            self.y_linha[alvo_linhas] = trajetoria.y_linha[validas, -1]
        self.tempo[alvo_linhas] = alvo[validas]
        saidas = linhas[~validas]
        self.saiu[saidas] = True
        self.tempo_saida[saidas] = trajetoria.tempo_saida[~validas]
        return trajetoria

    def fundamental(self, linhas: np.ndarray = None):
        """(A, A', B, B') atuais"""
        linhas = np.arange(self.lote) if linhas is None else linhas
        return separar_fundamental(self.y[linhas], self.y_linha[linhas])
