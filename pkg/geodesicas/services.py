"""
Operações públicas do app de geodésicas.

Geodésicas com referencial paralelo, aplicação logarítmica por tiro, campos e
tensores de Jacobi, problema de contorno D_{s,v}, tensor de Jacobi estável e
varreduras de pontos focais/conjugados.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from core.configuracao import parametro
from core.excecoes import (
    ErroConvergencia, ErroDominio, ErroHipotese, ErroPontoConjugado, ErroPrecondicao,
)
from core.numerica import extrapolar_richardson, norma_operador
from core.paralelo import mapa_ordenado, resolver_threads
from variedades.geometria import referencial_ortonormal
from variedades.modelos import VariedadeCarta

from .integrador import FluxoSegmentado, integrar_fluxo, par_fundamental, separar_fundamental
from .tipos import CaminhoGeodesico, CampoJacobi, CampoTensorJacobi, ResultadoTensorEstavel, VereditoFocal
from .tiro import aplicacao_log_lote

logger = logging.getLogger('laboratorio.geodesicas')

LIMIAR_SINGULAR = 1e-9
CONDICAO_MAXIMA = 1e12
FOLGA_MONOTONIA = 1e-9
PRECISAO_CONJUGADO = 1e-7


def _passos_exatos(comprimento: float, passo: float):
    n_passos = max(1, int(np.ceil(comprimento / passo - 1e-9)))
    return n_passos, comprimento / n_passos


def exigir_hipotese_conjugados(m: VariedadeCarta, operacao: str):
    if not m.bandeiras.sem_pontos_conjugados:
        raise ErroHipotese(
            f'{operacao} exige modelo sem pontos conjugados; {m.nome} não declara a hipótese',
            modelo=m.nome,
        )


# Geodésicas

def integrar_geodesica(m: VariedadeCarta, p, v, T: float, passo: float = None,
                       autoverificar: bool = False) -> CaminhoGeodesico:
    """
    Integra γ_v em [0, T] junto com o referencial paralelo de γ'⊥ e o par
    fundamental do tensor de Jacobi. Se a trajetória deixa a carta, devolve
    o trecho válido com ``truncado=True``.
    """
    p = m.exigir_dominio(p)
    v = m.exigir_unitario(p, v)
    if not T > 0:
        raise ErroPrecondicao(f'Comprimento da geodésica deve ser positivo: {T}')
    n_passos, passo_efetivo = _passos_exatos(float(T), passo or parametro('PASSO_INTEGRACAO'))
    referencial = referencial_ortonormal(m.metrica(p), v)
    y0, y_linha0 = par_fundamental(1, m.dim)
    trajetoria = integrar_fluxo(
        m, p[None], v[None], passo_efetivo, n_passos,
        referencial=referencial[None], y0=y0, y_linha0=y_linha0,
    )
    validos = int(np.sum(np.all(np.isfinite(trajetoria.x[0]), axis=-1)))
    truncado = bool(trajetoria.saiu[0])
    if truncado:
        logger.warning(
            f"Geodésica truncada na borda da carta | Modelo: {m.nome} | Tempo: {trajetoria.tempo_saida[0]:.6g}",
            extra={'modelo': m.nome, 'tempo_saida': float(trajetoria.tempo_saida[0]), 'comprimento': T},
        )
    caminho = CaminhoGeodesico(
        modelo=m,
        tempos=trajetoria.tempos[0, :validos],
        pontos=trajetoria.x[0, :validos],
        velocidades=trajetoria.u[0, :validos],
        referencial=trajetoria.referencial[0, :validos],
        y=trajetoria.y[0, :validos],
        y_linha=trajetoria.y_linha[0, :validos],
        passo=passo_efetivo,
        truncado=truncado,
        tempo_saida=float(trajetoria.tempo_saida[0]) if truncado else None,
    )
    if autoverificar and not truncado:
        caminho.erro_estimado = estimar_erro_passo(m, p, v, float(T), passo_efetivo, caminho.pontos[-1])
    return caminho


def estimar_erro_passo(m: VariedadeCarta, p, v, T: float, passo: float, final: np.ndarray = None) -> float:
    """Estimativa de Richardson do erro global do RK4 no ponto final (passo h contra h/2)"""
    n_passos, passo_efetivo = _passos_exatos(T, passo)
    if final is None:
        final = integrar_fluxo(m, p[None], v[None], passo_efetivo, n_passos, registrar_cada=n_passos).x[0, -1]
    fino = integrar_fluxo(m, p[None], v[None], passo_efetivo / 2.0, 2 * n_passos, registrar_cada=2 * n_passos)
    if fino.saiu[0]:
        return float('nan')
    diferenca = final - fino.x[0, -1]
    return float(m.norma(fino.x[0, -1], diferenca) * 16.0 / 15.0)


def aplicacao_log(m: VariedadeCarta, p, q, tolerancia: float = None) -> np.ndarray:
    """log_p(q) por tiro de Newton; p = q devolve o vetor nulo"""
    exigir_hipotese_conjugados(m, 'A aplicação logarítmica')
    p = m.exigir_dominio(p)
    q = m.exigir_dominio(q)
    resultado = aplicacao_log_lote(m, p[None], q[None], tolerancia=tolerancia)
    if not resultado.convergiu[0]:
        raise ErroConvergencia(
            f'Tiro de Newton não convergiu em {m.nome}',
            residuo=float(resultado.residuos[0]),
            iteracoes=int(resultado.iteracoes[0]),
        )
    return resultado.vetores[0]


def distancia(m: VariedadeCarta, p, q, tolerancia: float = None) -> float:
    """d(p, q) = |log_p(q)| na métrica de p"""
    vetor = aplicacao_log(m, p, q, tolerancia)
    return float(m.norma(np.asarray(p, dtype=float), vetor))


# Campos e tensores de Jacobi

def integrar_campo_jacobi(caminho: CaminhoGeodesico, y0, y_linha0) -> CampoJacobi:
    """Y = A Y(0) + B Y'(0) com dados iniciais no referencial paralelo em t = 0"""
    k = caminho.modelo.dim - 1
    y0 = np.asarray(y0, dtype=float).reshape(k)
    y_linha0 = np.asarray(y_linha0, dtype=float).reshape(k)
    if not (np.any(y0) or np.any(y_linha0)):
        raise ErroPrecondicao('Dados iniciais triviais: Y(0) = Y\'(0) = 0')
    a, a_linha, b, b_linha = caminho.fundamental
    return CampoJacobi(
        caminho=caminho,
        valores=np.einsum('tij,j->ti', a, y0) + np.einsum('tij,j->ti', b, y_linha0),
        derivadas=np.einsum('tij,j->ti', a_linha, y0) + np.einsum('tij,j->ti', b_linha, y_linha0),
    )


def _localizar_mudanca_sinal(tempos: np.ndarray, determinantes: np.ndarray) -> Optional[float]:
    """Primeiro t > 0 em que det B deixa de ser positivo (interpolação linear)"""
    ruins = np.flatnonzero(determinantes <= 0.0)
    if ruins.size == 0:
        return None
    j = ruins[0]
    if j == 0:
        return float(tempos[0])
    d0, d1 = determinantes[j - 1], determinantes[j]
    return float(tempos[j - 1] + (tempos[j] - tempos[j - 1]) * d0 / (d0 - d1))


def tensor_jacobi_pvc(caminho: CaminhoGeodesico, s: float) -> CampoTensorJacobi:
    """
    D_{s,v} com D(0) = Id e D(s) = 0, combinando o par fundamental:
    C = -B(s)^{-1} A(s), D = A + B C.
    """
    if not 0.0 < s <= caminho.comprimento * (1.0 + 1e-12):
        raise ErroPrecondicao(f's = {s} fora de (0, {caminho.comprimento}]')
    indice = caminho.indice_tempo(s)
    if indice is None:
        m = caminho.modelo
        caminho = integrar_geodesica(m, caminho.pontos[0], caminho.velocidades[0], s, passo=caminho.passo)
        if caminho.truncado:
            raise ErroDominio(f'Geodésica deixa a carta antes de s = {s}', tempo_saida=caminho.tempo_saida)
        indice = caminho.nos - 1
    a, a_linha, b, b_linha = (componente[: indice + 1] for componente in caminho.fundamental)
    tempo = _localizar_mudanca_sinal(caminho.tempos[1: indice + 1], np.linalg.det(b[1:]))
    if tempo is not None:
        raise ErroPontoConjugado(f'Ponto conjugado em t ≈ {tempo:.6g} antes de s = {s}', tempo=tempo, s=s)
    singulares = np.linalg.svd(b[-1], compute_uv=False)
    escala = max(1.0, float(norma_operador(a[-1])), float(singulares[0]))
    if singulares[-1] <= LIMIAR_SINGULAR * escala or singulares[0] > CONDICAO_MAXIMA * singulares[-1]:
        raise ErroPontoConjugado(
            f'Tensor fundamental singular em s = {s}', tempo=float(s), menor_valor_singular=float(singulares[-1]),
        )
    c = -np.linalg.solve(b[-1], a[-1])
    return CampoTensorJacobi(
        caminho=caminho,
        valores=a + np.einsum('tij,jk->tik', b, c),
        derivadas=a_linha + np.einsum('tij,jk->tik', b_linha, c),
        s=float(s),
    )


@dataclass
class LoteTensorEstavel:
    """Tensores estáveis de um lote de (ponto, direção)"""

    referenciais: np.ndarray
    d0_linha: np.ndarray
    agenda_usada: List[List[float]]
    lacunas: List[List[float]]
    convergiu: np.ndarray
    falhas: Dict[int, str] = field(default_factory=dict)
    tempos_falha: Dict[int, float] = field(default_factory=dict)
    normas_monotonas: Optional[np.ndarray] = None
    folgas_norma: Optional[np.ndarray] = None

    @property
    def lacuna_final(self) -> np.ndarray:
        return np.array([lacunas[-1] if lacunas else np.inf for lacunas in self.lacunas])


def modo_extrapolacao(m: VariedadeCarta, extrapolacao: Optional[str]) -> str:
    if extrapolacao is None:
        return 'richardson' if m.bandeiras.cauda_algebrica else 'nenhuma'
    if extrapolacao not in ('richardson', 'nenhuma'):
        raise ErroPrecondicao(f'Extrapolação desconhecida: {extrapolacao}')
    return extrapolacao


def tensor_jacobi_estavel_lote(m: VariedadeCarta, pontos: np.ndarray, direcoes: np.ndarray,
                               agenda: Sequence[float] = None, tolerancia: float = None,
                               extrapolacao: str = None, passo: float = None,
                               monitorar_norma: bool = False) -> LoteTensorEstavel:
    """
    D'_v(0) = lim D'_{s,v}(0) = lim -B(s)^{-1} A(s) para cada linha do lote.

    O fluxo avança trecho a trecho pela agenda e para cada linha assim que a
    diferença entre estimativas sucessivas (norma de operador) fica abaixo da
    tolerância.
    """
    pontos = np.atleast_2d(np.asarray(pontos, dtype=float))
    direcoes = np.atleast_2d(np.asarray(direcoes, dtype=float))
    agenda = sorted(float(s) for s in (agenda or parametro('AGENDA_ESTAVEL')))
    tolerancia = tolerancia or m.tolerancia('estavel', parametro('TOLERANCIA_ESTAVEL'))
    modo = modo_extrapolacao(m, extrapolacao)
    lote, n = pontos.shape

    referenciais = referencial_ortonormal(m.metrica(pontos), direcoes)
    fluxo = FluxoSegmentado(m, pontos, direcoes, referenciais, passo=passo)
    brutos = [[] for _ in range(lote)]
    estimativas = [[] for _ in range(lote)]
    lacunas = [[] for _ in range(lote)]
    agenda_usada = [[] for _ in range(lote)]
    convergiu = np.zeros(lote, dtype=bool)
    falhas, tempos_falha = {}, {}
    trechos = []
    ativos = np.arange(lote)

    for s in agenda:
        if ativos.size == 0:
            break
        trajetoria = fluxo.avancar_ate(s, ativos)
        if trajetoria is not None:
            trechos.append((ativos.copy(), trajetoria))
            # det B > 0 nos registros internos do trecho
            _, _, b_registros, _ = separar_fundamental(trajetoria.y, trajetoria.y_linha)
            with np.errstate(all='ignore'):
                determinantes = np.linalg.det(b_registros)
            determinantes = np.where(trajetoria.tempos > 0.0, determinantes, 1.0)
            for posicao, linha in enumerate(ativos):
                if fluxo.saiu[linha]:
                    continue
                tempo = _localizar_mudanca_sinal(trajetoria.tempos[posicao], determinantes[posicao])
                if tempo is not None:
                    falhas[int(linha)], tempos_falha[int(linha)] = 'ponto_conjugado', tempo
        for linha in ativos[fluxo.saiu[ativos]]:
            falhas.setdefault(int(linha), 'dominio')
            tempos_falha.setdefault(int(linha), float(fluxo.tempo_saida[linha]))
        ativos = np.array([linha for linha in ativos if int(linha) not in falhas], dtype=int)
        if ativos.size == 0:
            break

        a, _, b, _ = fluxo.fundamental(ativos)
        singulares = np.linalg.svd(b, compute_uv=False)
        singular = singulares[:, -1] <= LIMIAR_SINGULAR * np.maximum(1.0, singulares[:, 0])
        for linha in ativos[singular]:
            falhas[int(linha)], tempos_falha[int(linha)] = 'ponto_conjugado', s
        regulares = ~singular
        ativos, a, b = ativos[regulares], a[regulares], b[regulares]
        if ativos.size == 0:
            break
        c = -np.linalg.solve(b, a)

        restantes = []
        for posicao, linha in enumerate(ativos):
            brutos[linha].append(c[posicao])
            agenda_usada[linha].append(s)
            if modo == 'richardson' and len(brutos[linha]) >= 2:
                s_anterior = agenda_usada[linha][-2]
                estimativa = extrapolar_richardson(s_anterior, brutos[linha][-2], s, c[posicao])
            else:
                estimativa = c[posicao]
            estimativas[linha].append(estimativa)
            if len(estimativas[linha]) >= 2:
                lacuna = float(norma_operador(estimativas[linha][-1] - estimativas[linha][-2]))
                lacunas[linha].append(lacuna)
                if lacuna < tolerancia:
                    convergiu[linha] = True
                    continue
            restantes.append(linha)
        ativos = np.array(restantes, dtype=int)

    d0_linha = np.full((lote, n - 1, n - 1), np.nan)
    for linha in range(lote):
        if estimativas[linha] and linha not in falhas:
            d0_linha[linha] = estimativas[linha][-1]

    normas_monotonas = folgas = None
    if monitorar_norma:
        normas_monotonas, folgas = _monotonia_norma(lote, trechos, brutos, falhas)

    if falhas:
        logger.info(
            f"Tensor estável com falhas | Modelo: {m.nome} | Falhas: {len(falhas)} de {lote}",
            extra={'modelo': m.nome, 'falhas': len(falhas), 'lote': lote},
        )
    return LoteTensorEstavel(
        referenciais=referenciais,
        d0_linha=d0_linha,
        agenda_usada=agenda_usada,
        lacunas=lacunas,
        convergiu=convergiu,
        falhas=falhas,
        tempos_falha=tempos_falha,
        normas_monotonas=normas_monotonas,
        folgas_norma=folgas,
    )


def _monotonia_norma(lote, trechos, brutos, falhas):
    """‖D_{s,v}(t)‖ não crescente em t para o último s de cada linha"""
    monotonas = np.ones(lote, dtype=bool)
    folgas = np.zeros(lote)
    for linha in range(lote):
        if linha in falhas or not brutos[linha]:
            monotonas[linha] = False
            folgas[linha] = np.nan
            continue
        c = brutos[linha][-1]
        normas = [1.0]
        for linhas_trecho, trajetoria in trechos:
            posicoes = np.flatnonzero(linhas_trecho == linha)
            if posicoes.size == 0:
                continue
            a, _, b, _ = separar_fundamental(trajetoria.y[posicoes[0]], trajetoria.y_linha[posicoes[0]])
            normas.extend(norma_operador(a + b @ c)[1:].tolist())
        subida = float(np.max(np.diff(normas))) if len(normas) > 1 else 0.0
        folgas[linha] = max(subida, 0.0)
        monotonas[linha] = subida <= FOLGA_MONOTONIA
    return monotonas, folgas


def tensor_jacobi_estavel(m: VariedadeCarta, p, v, agenda: Sequence[float] = None, tolerancia: float = None,
                          extrapolacao: str = None, passo: float = None,
                          exigir_convergencia: bool = True) -> ResultadoTensorEstavel:
    """Tensor de Jacobi estável D_v ao longo de γ_v partindo de p"""
    exigir_hipotese_conjugados(m, 'O tensor de Jacobi estável')
    p = m.exigir_dominio(p)
    v = m.exigir_unitario(p, v)
    tolerancia = tolerancia or m.tolerancia('estavel', parametro('TOLERANCIA_ESTAVEL'))
    lote = tensor_jacobi_estavel_lote(
        m, p[None], v[None], agenda, tolerancia, extrapolacao, passo, monitorar_norma=True,
    )
    if 0 in lote.falhas:
        tempo = lote.tempos_falha[0]
        if lote.falhas[0] == 'ponto_conjugado':
            raise ErroPontoConjugado(f'Ponto conjugado ao longo de γ_v em t ≈ {tempo:.6g}', tempo=tempo)
        raise ErroDominio(f'γ_v deixa a carta em t ≈ {tempo:.6g}', tempo_saida=tempo)

    d0_linha = lote.d0_linha[0]
    lacunas = lote.lacunas[0]
    lacuna = lacunas[-1] if lacunas else float('inf')
    escala = max(1.0, float(np.max(np.abs(d0_linha))))
    assimetria = float(np.max(np.abs(d0_linha - d0_linha.T))) / escala
    resultado = ResultadoTensorEstavel(
        base=p,
        direcao=v,
        referencial=lote.referenciais[0],
        d0=np.eye(m.dim - 1),
        d0_linha=d0_linha,
        agenda=lote.agenda_usada[0],
        lacuna=lacuna,
        lacunas=lacunas,
        convergiu=bool(lote.convergiu[0]),
        extrapolacao=modo_extrapolacao(m, extrapolacao),
        assimetria=assimetria,
        lacunas_monotonas=bool(np.all(np.diff(lacunas) <= FOLGA_MONOTONIA)) if len(lacunas) > 1 else True,
        norma_monotona=bool(lote.normas_monotonas[0]),
        folga_norma=float(lote.folgas_norma[0]),
        diagnosticos={'metrica': m.metrica(p)},
    )
    if assimetria > 1e-6:
        logger.warning(
            f"D'_v(0) assimétrico | Modelo: {m.nome} | Assimetria: {assimetria:.3e}",
            extra={'modelo': m.nome, 'assimetria': assimetria},
        )
    if not resultado.convergiu:
        logger.warning(
            f"Tensor estável não convergiu | Modelo: {m.nome} | Lacunas: {lacunas[-3:]}",
            extra={'modelo': m.nome, 'lacunas': lacunas[-3:]},
        )
        if exigir_convergencia:
            raise ErroConvergencia(
                f'Tensor estável não convergiu na agenda {resultado.agenda}', diferencas=lacunas[-3:],
            )
    return resultado


# Pontos focais e conjugados

def monitorar_pontos_focais(campo: CampoJacobi) -> VereditoFocal:
    """Verifica d/dt |Y|² = 2 <Y', Y> > 0 em todos os nós t > 0"""
    if np.linalg.norm(campo.valores[0]) > 1e-12:
        raise ErroPrecondicao('O monitor de pontos focais exige Y(0) = 0')
    if not np.any(campo.derivadas[0]):
        raise ErroPrecondicao('Campo de Jacobi trivial')
    derivada = 2.0 * np.einsum('ti,ti->t', campo.derivadas, campo.valores)
    violacoes = np.flatnonzero(derivada[1:] <= 0.0)
    if violacoes.size == 0:
        return VereditoFocal(estritamente_crescente=True)
    indice = violacoes[0] + 1
    return VereditoFocal(
        estritamente_crescente=False,
        tempo_violacao=float(campo.tempos[indice]),
        derivada_violacao=float(derivada[indice]),
    )


def varrer_pontos_conjugados(m: VariedadeCarta, p, v, T: float, passo: float = None) -> List[float]:
    """Zeros de det B(t) (Y(0) = 0, Y'(0) = Id) por mudança de sinal e bissecção"""
    caminho = integrar_geodesica(m, p, v, T, passo=passo)
    _, _, b, _ = caminho.fundamental
    determinantes = np.linalg.det(b)
    tempos = []
    for j in range(1, caminho.nos - 1):
        if determinantes[j] == 0.0:
            tempos.append(float(caminho.tempos[j]))
        elif determinantes[j] * determinantes[j + 1] < 0.0:
            tempos.append(_bissectar_conjugado(caminho, j, determinantes[j]))
    if caminho.truncado:
        logger.info(
            f"Varredura de pontos conjugados truncada | Modelo: {m.nome} | Até: {caminho.comprimento:.6g}",
            extra={'modelo': m.nome, 'comprimento': caminho.comprimento},
        )
    return tempos


def _bissectar_conjugado(caminho: CaminhoGeodesico, j: int, sinal_inicial: float) -> float:
    m = caminho.modelo
    estado = dict(
        x0=caminho.pontos[j][None], u0=caminho.velocidades[j][None],
        referencial=caminho.referencial[j][None], y0=caminho.y[j][None], y_linha0=caminho.y_linha[j][None],
    )

    def determinante(delta):
        trajetoria = integrar_fluxo(m, passo=delta, n_passos=1, **estado)
        _, _, b, _ = separar_fundamental(trajetoria.y[0, -1], trajetoria.y_linha[0, -1])
        return np.linalg.det(b)

    esquerda, direita = 0.0, caminho.passo
    while direita - esquerda > PRECISAO_CONJUGADO:
        meio = 0.5 * (esquerda + direita)
        if determinante(meio) * sinal_inicial > 0.0:
            esquerda = meio
        else:
            direita = meio
    return float(caminho.tempos[j] + 0.5 * (esquerda + direita))


def amostrar_continuidade_assintota(m: VariedadeCarta, p, direcoes: np.ndarray, vizinhanca: float = 0.2,
                                    agenda: Sequence[float] = None, threads: int = None) -> Dict:
    """
    Amostra a continuidade de v -> D'_v(0): maior razão |ΔD'|/|Δv| entre
    pares de direções vizinhas (formas coordenadas g E D' Eᵀ g) e o L empírico
    max |D'_v(0)|.
    """
    p = m.exigir_dominio(p)
    direcoes = m.normalizar(np.broadcast_to(p, direcoes.shape), direcoes)
    blocos = np.array_split(np.arange(direcoes.shape[0]), resolver_threads(threads))
    partes = mapa_ordenado(
        lambda indices: tensor_jacobi_estavel_lote(
            m, np.broadcast_to(p, (indices.size, m.dim)), direcoes[indices], agenda,
        ),
        [bloco for bloco in blocos if bloco.size],
        threads,
    )
    d0_linha = np.concatenate([parte.d0_linha for parte in partes])
    referenciais = np.concatenate([parte.referenciais for parte in partes])
    g = m.metrica(p)
    formas = np.einsum('ab,kbi,kij,kcj,cd->kad', g, referenciais, d0_linha, referenciais, g)
    razao_maxima, pares = 0.0, 0
    for i in range(direcoes.shape[0]):
        for j in range(i + 1, direcoes.shape[0]):
            distancia_direcoes = float(m.norma(p, direcoes[i] - direcoes[j]))
            if 0.0 < distancia_direcoes <= vizinhanca:
                pares += 1
                variacao = float(norma_operador(formas[i] - formas[j]))
                razao_maxima = max(razao_maxima, variacao / distancia_direcoes)
    return {
        'razao_maxima': razao_maxima,
        'pares': pares,
        'L_empirico': float(np.nanmax(norma_operador(d0_linha))),
        'falhas': int(np.sum(np.isnan(d0_linha[:, 0, 0]))),
    }
