"""
Aplicação logarítmica por tiro de Newton em lote.

Resolve exp_p(w) = q para cada linha. A jacobiana ∂exp_p/∂w vem do fluxo
linearizado; cada linha faz sua própria busca linear amortecida.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import special

from core.configuracao import parametro
from variedades.modelos import VariedadeCarta

from .integrador import exponencial_linearizada

logger = logging.getLogger('laboratorio.geodesicas')

MEIAS_BUSCA = 30
NOS_COMPRIMENTO = 8


@dataclass
class ResultadoTiro:
    vetores: np.ndarray
    residuos: np.ndarray
    convergiu: np.ndarray
    iteracoes: np.ndarray


def comprimento_segmento(m: VariedadeCarta, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Comprimento do segmento coordenado p -> q (Gauss-Legendre)"""
    nos, pesos = special.roots_legendre(NOS_COMPRIMENTO)
    tau = 0.5 * (nos + 1.0)
    diferenca = q - p
    pontos = p[:, None, :] + tau[None, :, None] * diferenca[:, None, :]
    velocidades = np.broadcast_to(diferenca[:, None, :], pontos.shape)
    normas = m.norma(pontos, velocidades)
    return 0.5 * np.einsum('k,bk->b', pesos, normas)


def _residuo_metrico(m: VariedadeCarta, q: np.ndarray, erro: np.ndarray) -> np.ndarray:
    with np.errstate(all='ignore'):
        residuo = m.norma(q, erro)
    return np.where(np.isfinite(residuo), residuo, np.inf)


def _passos(m: VariedadeCarta, p: np.ndarray, w: np.ndarray, passo: float) -> int:
    comprimento = float(np.max(m.norma(p, w))) if w.size else 0.0
    return int(min(max(np.ceil(comprimento / passo), 8), parametro('PASSOS_MAXIMOS_TIRO')))


def _avaliar(m, p, q, w, passo):
    destino, jacobiana, saiu = exponencial_linearizada(m, p, w, _passos(m, p, w, passo))
    erro = destino - q
    residuo = np.where(saiu, np.inf, _residuo_metrico(m, q, erro))
    return erro, jacobiana, residuo, saiu


def aplicacao_log_lote(m: VariedadeCarta, p: np.ndarray, q: np.ndarray, chute: np.ndarray = None,
                       tolerancia: float = None, iteracoes: int = None, passo: float = None) -> ResultadoTiro:
    """
    log_p(q) para lotes de pares (p, q) de forma (B, n).

    Critérios de parada por linha: resíduo métrico |exp_p(w) - q|_g abaixo da
    tolerância; resíduo coordenado no piso de arredondamento de q; ou busca
    linear estagnada com resíduo já pequeno.
    """
    p = np.atleast_2d(np.asarray(p, dtype=float))
    q = np.atleast_2d(np.asarray(q, dtype=float))
    p = np.broadcast_to(p, q.shape).copy() if p.shape[0] == 1 else p
    tolerancia = tolerancia or parametro('TOLERANCIA_TIRO')
    iteracoes = iteracoes or parametro('ITERACOES_TIRO')
    passo = passo or parametro('PASSO_INTEGRACAO')
    lote, n = q.shape

    if chute is None:
        diferenca = q - p
        escala = comprimento_segmento(m, p, q) / np.maximum(m.norma(p, diferenca), 1e-300)
        w = diferenca * escala[:, None]
    else:
        w = np.asarray(chute, dtype=float).copy()

    iguais = np.all(q == p, axis=-1)
    w[iguais] = 0.0
    residuos = np.where(iguais, 0.0, np.inf)
    convergiu = iguais.copy()
    contagem = np.zeros(lote, dtype=int)
    piso = 8.0 * np.finfo(float).eps * np.maximum(1.0, np.max(np.abs(q), axis=-1))
    limiar_estagnacao = max(1e-8, 1e3 * tolerancia)

    ativos = np.flatnonzero(~convergiu)
    if ativos.size:
        erro, jacobiana, residuo, _ = _avaliar(m, p[ativos], q[ativos], w[ativos], passo)
        residuos[ativos] = residuo
    for iteracao in range(iteracoes):
        if ativos.size == 0:
            break
        erro_coordenado = np.max(np.abs(erro), axis=-1)
        prontos = (residuos[ativos] < tolerancia) | (erro_coordenado <= piso[ativos])
        convergiu[ativos[prontos]] = True
        manter = ~prontos
        ativos, erro, jacobiana = ativos[manter], erro[manter], jacobiana[manter]
        if ativos.size == 0:
            break
        contagem[ativos] += 1

        with np.errstate(all='ignore'):
            try:
                direcao = -np.linalg.solve(jacobiana, erro[..., None])[..., 0]
            except np.linalg.LinAlgError:
                direcao = np.stack([
                    -np.linalg.lstsq(jac, err, rcond=None)[0] for jac, err in zip(jacobiana, erro)
                ])

        fator = np.ones(ativos.size)
        pendentes = np.arange(ativos.size)
        novo_erro, nova_jacobiana = erro.copy(), jacobiana.copy()
        aceito = np.zeros(ativos.size, dtype=bool)
        for _ in range(MEIAS_BUSCA):
            if pendentes.size == 0:
                break
            linhas = ativos[pendentes]
            tentativa = w[linhas] + fator[pendentes, None] * direcao[pendentes]
            erro_t, jac_t, residuo_t, saiu_t = _avaliar(m, p[linhas], q[linhas], tentativa, passo)
            melhora = ~saiu_t & (residuo_t < residuos[linhas])
            indices = pendentes[melhora]
            w[ativos[indices]] = tentativa[melhora]
            residuos[ativos[indices]] = residuo_t[melhora]
            novo_erro[indices], nova_jacobiana[indices] = erro_t[melhora], jac_t[melhora]
            aceito[indices] = True
            pendentes = pendentes[~melhora]
            fator[pendentes] *= 0.5

        estagnados = ~aceito
        if np.any(estagnados):
            linhas = ativos[estagnados]
            pequenos = residuos[linhas] < limiar_estagnacao
            convergiu[linhas[pequenos]] = True
            logger.debug(
                f"Busca linear estagnada | Modelo: {m.nome} | Linhas: {int(estagnados.sum())}",
                extra={'modelo': m.nome, 'iteracao': iteracao, 'linhas': int(estagnados.sum())},
            )
            manter = ~estagnados
            ativos, novo_erro, nova_jacobiana = ativos[manter], novo_erro[manter], nova_jacobiana[manter]
        erro, jacobiana = novo_erro, nova_jacobiana
    else:
        if ativos.size:
            erro_coordenado = np.max(np.abs(erro), axis=-1)
            prontos = (residuos[ativos] < tolerancia) | (erro_coordenado <= piso[ativos])
            convergiu[ativos[prontos]] = True

    if not np.all(convergiu):
        logger.warning(
            f"Tiro não convergiu | Modelo: {m.nome} | Linhas: {int((~convergiu).sum())} | "
            f"Resíduo máximo: {float(np.max(residuos[~convergiu])):.3e}",
            extra={'modelo': m.nome, 'falhas': int((~convergiu).sum())},
        )
    return ResultadoTiro(vetores=w, residuos=residuos, convergiu=convergiu, iteracoes=contagem)
