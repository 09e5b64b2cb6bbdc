"""
Mapa paralelo com redução ordenada.

Os itens são processados por um ThreadPoolExecutor e remontados na ordem de
entrada, de modo que execuções com 1 ou N threads produzem o mesmo resultado.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, TypeVar

import numpy as np

from .configuracao import parametro

T = TypeVar('T')
R = TypeVar('R')


def resolver_threads(threads: int = None) -> int:
    """Número efetivo de threads (parâmetro explícito ou configuração)"""
    if threads is None:
        threads = parametro('THREADS')
    return max(1, int(threads))


def mapa_ordenado(funcao: Callable[[T], R], itens: Sequence[T], threads: int = None) -> List[R]:
    """Aplica ``funcao`` a cada item preservando a ordem dos resultados"""
    threads = resolver_threads(threads)
    if threads == 1 or len(itens) <= 1:
        return [funcao(item) for item in itens]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(funcao, itens))


def mapa_em_blocos(funcao: Callable[[np.ndarray], np.ndarray], lote: np.ndarray, threads: int = None) -> np.ndarray:
    """
    Divide ``lote`` ao longo do primeiro eixo, processa os blocos em paralelo
    e concatena na ordem original. ``funcao`` deve tratar cada linha de forma
    independente.
    """
    threads = resolver_threads(threads)
    if threads == 1 or lote.shape[0] <= 1:
        return funcao(lote)
    blocos = np.array_split(np.arange(lote.shape[0]), min(threads, lote.shape[0]))
    partes = mapa_ordenado(lambda indices: funcao(lote[indices]), blocos, threads)
    return np.concatenate(partes, axis=0)
