"""
Utilitários numéricos compartilhados pelos apps do laboratório.

Passo clássico de Runge-Kutta de 4ª ordem sobre tuplas de arrays, diferenças
finitas, quadraturas na esfera unitária, amostras de baixa discrepância e
extrapolação de Richardson em 1/t.
"""

from typing import Callable, Sequence, Tuple

import numpy as np
from scipy import special, stats

Estado = Tuple[np.ndarray, ...]


def _somar(estado: Estado, incremento: Estado, fator) -> Estado:
    return tuple(
        componente + _ajustar_fator(fator, componente) * derivada
        for componente, derivada in zip(estado, incremento)
    )


def _ajustar_fator(fator, componente: np.ndarray):
    """Passo escalar ou por linha do lote (B,) com broadcast sobre o restante"""
    if np.ndim(fator) == 0:
        return fator
    return np.reshape(fator, fator.shape + (1,) * (componente.ndim - 1))


def passo_rk4(campo: Callable[[Estado], Estado], estado: Estado, passo) -> Estado:
    """Um passo de RK4; ``passo`` pode ser escalar ou um array (B,) por linha"""
    k1 = campo(estado)
    k2 = campo(_somar(estado, k1, 0.5 * passo))
    k3 = campo(_somar(estado, k2, 0.5 * passo))
    k4 = campo(_somar(estado, k3, passo))
    return tuple(
        componente + _ajustar_fator(passo, componente) / 6.0 * (a + 2.0 * b + 2.0 * c + d)
        for componente, a, b, c, d in zip(estado, k1, k2, k3, k4)
    )


def gradiente_diferencas(funcao: Callable[[np.ndarray], float], x: np.ndarray, passo: float) -> np.ndarray:
    """Gradiente coordenado por diferenças centrais"""
    x = np.asarray(x, dtype=float)
    gradiente = np.zeros_like(x)
    for i in range(x.size):
        deslocamento = np.zeros_like(x)
        deslocamento[i] = passo
        gradiente[i] = (funcao(x + deslocamento) - funcao(x - deslocamento)) / (2.0 * passo)
    return gradiente


def hessiano_diferencas(funcao: Callable[[np.ndarray], float], x: np.ndarray, passo: float) -> np.ndarray:
    """Hessiano coordenado (segunda ordem) por diferenças centrais"""
    x = np.asarray(x, dtype=float)
    n = x.size
    base = np.eye(n) * passo
    centro = funcao(x)
    hessiano = np.zeros((n, n))
    for i in range(n):
        hessiano[i, i] = (funcao(x + base[i]) - 2.0 * centro + funcao(x - base[i])) / passo ** 2
        for j in range(i + 1, n):
            valor = (
                funcao(x + base[i] + base[j]) - funcao(x + base[i] - base[j])
                - funcao(x - base[i] + base[j]) + funcao(x - base[i] - base[j])
            ) / (4.0 * passo ** 2)
            hessiano[i, j] = hessiano[j, i] = valor
    return hessiano


def derivada_cinco_pontos(valores: np.ndarray, passo: float) -> np.ndarray:
    """Primeira derivada de quarta ordem ao longo do eixo 0; bordas NaN"""
    valores = np.asarray(valores, dtype=float)
    resultado = np.full_like(valores, np.nan)
    resultado[2:-2] = (-valores[4:] + 8.0 * valores[3:-1] - 8.0 * valores[1:-3] + valores[:-4]) / (12.0 * passo)
    return resultado


def segunda_derivada_cinco_pontos(valores: np.ndarray, passo: float) -> np.ndarray:
    """
    Segunda derivada de quarta ordem ao longo do eixo 0 para nós interiores
    (índices 2..N-3); as bordas ficam NaN.
    """
    valores = np.asarray(valores, dtype=float)
    resultado = np.full_like(valores, np.nan)
    resultado[2:-2] = (
        -valores[4:] + 16.0 * valores[3:-1] - 30.0 * valores[2:-2] + 16.0 * valores[1:-3] - valores[:-4]
    ) / (12.0 * passo ** 2)
    return resultado


def extrapolar_richardson(t_anterior: float, valor_anterior, t_atual: float, valor_atual):
    """Remove o termo 1/t de uma sequência v(t) = L + c/t + o(1/t)"""
    return (t_atual * valor_atual - t_anterior * valor_anterior) / (t_atual - t_anterior)


def extrapolar_neville(tempos: Sequence[float], valores: Sequence, ordem: int):
    """
    Valor em 1/t = 0 do polinômio em 1/t que interpola os últimos ``ordem + 1``
    pares (t, v). Com ordem 1 coincide com ``extrapolar_richardson``.
    """
    quantidade = min(ordem + 1, len(tempos))
    nos = 1.0 / np.asarray(tempos[-quantidade:], dtype=float)
    tabela = [np.asarray(valor, dtype=float) for valor in valores[-quantidade:]]
    for nivel in range(1, quantidade):
        tabela = [
            (nos[i] * tabela[i + 1] - nos[i + nivel] * tabela[i]) / (nos[i] - nos[i + nivel])
            for i in range(quantidade - nivel)
        ]
    return tabela[0]


def area_esfera(dim: int) -> float:
    """Área da esfera unitária S^{dim-1} ⊂ R^dim"""
    return float(2.0 * np.pi ** (dim / 2.0) / np.exp(special.gammaln(dim / 2.0)))


def quadratura_esfera(dim: int, ordem: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Regra produto na esfera unitária de R^dim.

    Círculo: Gauss-Legendre no ângulo com ``2*ordem`` nós. Dimensões maiores:
    recursão x = (sqrt(1-z²) y, z) com nós de Gauss-Jacobi em z para o peso
    (1-z²)^{(dim-3)/2}. Os pesos somam a área da esfera.
    """
    if dim < 2:
        raise ValueError('A quadratura esférica exige dim >= 2')
    if dim == 2:
        nos, pesos = special.roots_legendre(2 * ordem)
        angulos = np.pi * (nos + 1.0)
        pontos = np.stack([np.cos(angulos), np.sin(angulos)], axis=-1)
        return pontos, np.pi * pesos
    expoente = (dim - 3) / 2.0
    nos_z, pesos_z = special.roots_jacobi(ordem, expoente, expoente)
    pontos_baixo, pesos_baixo = quadratura_esfera(dim - 1, ordem)
    raio = np.sqrt(1.0 - nos_z ** 2)
    pontos = np.concatenate([
        (raio[:, None, None] * pontos_baixo[None, :, :]).reshape(-1, dim - 1),
        np.repeat(nos_z, pontos_baixo.shape[0])[:, None],
    ], axis=1)
    pesos = (pesos_z[:, None] * pesos_baixo[None, :]).reshape(-1)
    return pontos, pesos


def angulos_equiespacados(quantidade: int) -> np.ndarray:
    """Vetores unitários de R² em ângulos 2πk/K"""
    angulos = 2.0 * np.pi * np.arange(quantidade) / quantidade
    return np.stack([np.cos(angulos), np.sin(angulos)], axis=-1)


def direcoes_baixa_discrepancia(dim: int, quantidade: int, semente: int = 0) -> np.ndarray:
    """Direções em S^{dim-1} (Halton embaralhado -> normal -> normalização)"""
    amostrador = stats.qmc.Halton(d=dim, scramble=True, seed=semente)
    uniformes = np.clip(amostrador.random(quantidade), 1e-12, 1.0 - 1e-12)
    normais = stats.norm.ppf(uniformes)
    return normais / np.linalg.norm(normais, axis=-1, keepdims=True)


def direcoes_esfera(dim: int, quantidade: int, semente: int = 0) -> np.ndarray:
    """Equiespaçadas no círculo, baixa discrepância em dimensão >= 3"""
    if dim == 2:
        return angulos_equiespacados(quantidade)
    return direcoes_baixa_discrepancia(dim, quantidade, semente)


def vetores_bola_baixa_discrepancia(dim: int, quantidade: int, raio: float, semente: int = 0) -> np.ndarray:
    """Vetores uniformes na bola euclidiana de raio ``raio`` (coordenadas ortonormais)"""
    amostrador = stats.qmc.Halton(d=dim + 1, scramble=True, seed=semente)
    amostras = np.clip(amostrador.random(quantidade), 1e-12, 1.0 - 1e-12)
    normais = stats.norm.ppf(amostras[:, :dim])
    direcoes = normais / np.linalg.norm(normais, axis=-1, keepdims=True)
    raios = raio * amostras[:, dim] ** (1.0 / dim)
    return direcoes * raios[:, None]


def pesos_diadicos(quantidade: int) -> np.ndarray:
    """Pesos 2^{-k}, k = 1..K, renormalizados para somar 1"""
    pesos = 0.5 ** np.arange(1, quantidade + 1)
    return pesos / pesos.sum()


def simetrizar(matriz: np.ndarray) -> np.ndarray:
    return 0.5 * (matriz + np.swapaxes(matriz, -1, -2))


def norma_operador(matriz: np.ndarray) -> np.ndarray:
    """Norma espectral sobre os dois últimos eixos"""
    return np.linalg.norm(matriz, ord=2, axis=(-2, -1))
