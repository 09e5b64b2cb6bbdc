"""
Executores por tipo de experimento.

Cada executor recebe o modelo construído, os parâmetros já validados pelo
serializer do tipo e o contexto (diretório, semente, threads) e devolve um
ResultadoExecutor: veredito bruto, escalares, verificações de expectativa,
avisos (usados por --strict) e os artefatos gravados.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from convexidade.busemann import (
    MedidaFronteira, bilaplaciano_F, funcao_media_F, gradiente_busemann, hessiano_busemann, verificar_curva_integral,
)
from convexidade.certificados import amostrar_pontos_bola, certificar_convexidade_estrita
from convexidade.services import constantes_teorema_radial, verificar_razao_lambda
from core.excecoes import ErroModeloNaoSuportado, ErroPrecondicao
from core.numerica import direcoes_esfera, norma_operador
from core.paralelo import mapa_ordenado
from core.relatorios import escrever_csv, escrever_json
from espectral.plancherel import densidade_funcao_c, faixa_essencial, funcao_esferica, verificar_relacao_autovalor
from espectral.posto import direcoes_com_pesos, verificacoes_posto_superior
from espectral.radializacao import funcao_suporte_compacto, radializar, residuo_comutacao
from espectral.services import perfil_radial, relatorio_espectral
from geodesicas import services as geodesicas
from geodesicas.tipos import exportar_tensor_csv
from variedades.auditoria import auditar_curvatura_radial
from variedades.geometria import autovalores_metricos, base_ortonormal
from variedades.modelos import VariedadeCarta

logger = logging.getLogger('laboratorio.experimentos')

FOLGA_ASSIMETRIA = 1e-6


@dataclass
class ContextoExperimento:
    nome: str
    diretorio: Path
    semente: int = 0
    threads: int = 1

    def arquivo(self, nome: str) -> Path:
        return Path(self.diretorio) / nome


@dataclass
class ResultadoExecutor:
    aprovado: bool
    escalares: Dict[str, Any]
    verificacoes: Dict[str, bool] = field(default_factory=dict)
    avisos: List[str] = field(default_factory=list)
    artefatos: List[Path] = field(default_factory=list)


def _vetor(m: VariedadeCarta, valores, nome: str) -> np.ndarray:
    vetor = np.asarray(valores, dtype=float)
    if vetor.shape != (m.dim,):
        raise ErroPrecondicao(f'{nome} deve ter {m.dim} coordenadas', recebido=list(vetor.shape))
    return vetor


def _ponto(m: VariedadeCarta, parametros: Dict, chave: str = 'ponto') -> np.ndarray:
    if parametros.get(chave) is None:
        return m.origem
    return m.exigir_dominio(_vetor(m, parametros[chave], chave))


def _direcao(m: VariedadeCarta, p: np.ndarray, parametros: Dict) -> np.ndarray:
    """Direção unitária em p; sem 'direcao', o primeiro vetor da base ortonormal"""
    if parametros.get('direcao') is None:
        return base_ortonormal(m.metrica(p))[:, 0]
    return m.normalizar(p, _vetor(m, parametros['direcao'], 'direcao'))


def _direcoes(m: VariedadeCarta, p: np.ndarray, quantidade: int, semente: int) -> np.ndarray:
    """Direções unitárias em p, ortonormais para metric(p)"""
    return np.einsum('ij,kj->ki', base_ortonormal(m.metrica(p)), direcoes_esfera(m.dim, quantidade, semente))


# Geodésicas e Jacobi

def executar_geodesica(m: VariedadeCarta, parametros: Dict, contexto: ContextoExperimento) -> ResultadoExecutor:
    p = _ponto(m, parametros)
    v = _direcao(m, p, parametros)
    caminho = geodesicas.integrar_geodesica(
        m, p, v, parametros['T'], passo=parametros.get('passo'), autoverificar=parametros['autoverificar'],
    )
    escalares = {
        'comprimento': caminho.comprimento,
        'truncado': caminho.truncado,
        'residuo_geodesico': caminho.residuo_geodesico(),
        'desvio_velocidade': caminho.desvio_velocidade_unitaria(),
        'desvio_referencial': caminho.desvio_referencial(),
        'erro_estimado': caminho.erro_estimado,
    }
    tolerancia = parametros['tolerancia']
    aprovado = max(escalares['residuo_geodesico'], escalares['desvio_velocidade'],
                   escalares['desvio_referencial']) <= tolerancia
    avisos = ['geodesica_truncada'] if caminho.truncado else []
    artefatos = [caminho.exportar_csv(contexto.arquivo('geodesica.csv'))]

    if parametros.get('destino') is not None:
        q = m.exigir_dominio(_vetor(m, parametros['destino'], 'destino'))
        w = geodesicas.aplicacao_log(m, p, q)
        distancia = float(m.norma(p, w))
        chegada = geodesicas.integrar_geodesica(m, p, w / distancia, distancia, passo=parametros.get('passo'))
        escalares.update({
            'log': w,
            'distancia': distancia,
            'desvio_log': float(np.max(np.abs(chegada.pontos[-1] - q))),
        })
        aprovado = aprovado and escalares['desvio_log'] <= parametros['tolerancia_distancia']
        if m.oraculos.distancia is not None:
            escalares['desvio_distancia'] = abs(distancia - float(m.oraculos.distancia(p, q)))
            aprovado = aprovado and escalares['desvio_distancia'] <= parametros['tolerancia_distancia']
    return ResultadoExecutor(aprovado=aprovado, escalares=escalares, avisos=avisos, artefatos=artefatos)


def executar_jacobi(m: VariedadeCarta, parametros: Dict, contexto: ContextoExperimento) -> ResultadoExecutor:
    p = _ponto(m, parametros)
    v = _direcao(m, p, parametros)
    k = m.dim - 1
    if k < 1:
        raise ErroPrecondicao('Campos de Jacobi transversais exigem dimensão >= 2')
    caminho = geodesicas.integrar_geodesica(m, p, v, parametros['T'], passo=parametros.get('passo'))
    y_linha0 = np.eye(k)[0] if parametros.get('y_linha0') is None else np.asarray(parametros['y_linha0'], float)
    if y_linha0.shape != (k,):
        raise ErroPrecondicao(f'y_linha0 deve ter {k} componentes no referencial')
    campo = geodesicas.integrar_campo_jacobi(caminho, np.zeros(k), y_linha0)
    tensor = geodesicas.tensor_jacobi_pvc(caminho, parametros.get('s') or caminho.comprimento)
    escalares = {
        'comprimento': caminho.comprimento,
        'residuo_jacobi': campo.residuo(),
        'desvio_wronskiano': tensor.desvio_wronskiano(),
        'norma_final_pvc': tensor.norma_final(),
    }
    tolerancia = parametros['tolerancia']
    aprovado = max(
        escalares['residuo_jacobi'], escalares['desvio_wronskiano'], escalares['norma_final_pvc']
    ) <= tolerancia
    verificacoes, avisos = {}, []
    artefatos = [exportar_tensor_csv(tensor, contexto.arquivo('tensor_pvc.csv'))]

    if m.bandeiras.sem_pontos_conjugados:
        estavel = geodesicas.tensor_jacobi_estavel(
            m, p, v, agenda=parametros.get('agenda'), tolerancia=parametros.get('tolerancia_estavel'),
            extrapolacao=parametros.get('extrapolacao'), passo=parametros.get('passo'), exigir_convergencia=False,
        )
        escalares['estavel'] = estavel.como_dict()
        escalares['espectro_d0_linha'] = estavel.espectro
        aprovado = aprovado and estavel.convergiu
        if estavel.assimetria > FOLGA_ASSIMETRIA:
            avisos.append('assimetria_d0_linha')
        if not estavel.lacunas_monotonas:
            avisos.append('lacunas_nao_monotonas')
        if estavel.norma_monotona is False:
            avisos.append('norma_nao_monotona')
        curvatura = m.bandeiras.curvatura_constante
        if curvatura is not None and curvatura <= 0.0:
            verificacoes['sanduiche_espectral'] = estavel.no_sanduiche(abs(curvatura))
        if parametros.get('d0_linha_esperado') is not None:
            desvio = float(norma_operador(estavel.d0_linha - parametros['d0_linha_esperado'] * np.eye(k)))
            escalares['desvio_d0_linha'] = desvio
            verificacoes['d0_linha_esperado'] = desvio <= parametros['tolerancia_esperado']
        artefatos.append(escrever_json(contexto.arquivo('tensor_estavel.json'), estavel.como_dict()))

    if parametros['continuidade']:
        direcoes = _direcoes(m, p, parametros['continuidade'], contexto.semente)
        escalares['continuidade'] = geodesicas.amostrar_continuidade_assintota(
            m, p, direcoes, agenda=parametros.get('agenda'), threads=contexto.threads,
        )
    return ResultadoExecutor(aprovado, escalares, verificacoes, avisos, artefatos)


def executar_varredura_focal(m: VariedadeCarta, parametros: Dict, contexto: ContextoExperimento) -> ResultadoExecutor:
    p = _ponto(m, parametros)
    if parametros.get('direcao') is not None:
        direcoes = _direcao(m, p, parametros)[None]
    else:
        direcoes = _direcoes(m, p, parametros['direcoes'], contexto.semente)
    T, passo, k = parametros['T'], parametros.get('passo'), m.dim - 1

    def varrer(v):
        caminho = geodesicas.integrar_geodesica(m, p, v, T, passo=passo)
        vereditos = [
            geodesicas.monitorar_pontos_focais(geodesicas.integrar_campo_jacobi(caminho, np.zeros(k), np.eye(k)[j]))
            for j in range(k)
        ]
        return caminho.comprimento, vereditos, geodesicas.varrer_pontos_conjugados(m, p, v, T, passo=passo)

    varreduras = mapa_ordenado(varrer, list(direcoes), contexto.threads)
    linhas, violacoes, conjugados = [], [], []
    for indice, (comprimento, vereditos, tempos) in enumerate(varreduras):
        tempos_violacao = [veredito.tempo_violacao for veredito in vereditos if not veredito.estritamente_crescente]
        primeiro = min(tempos_violacao) if tempos_violacao else None
        if primeiro is not None:
            violacoes.append((primeiro, indice))
        conjugados.append(tempos)
        linhas.append([indice, comprimento, primeiro is None, '' if primeiro is None else primeiro, len(tempos)])

    testemunha = min(violacoes) if violacoes else None
    escalares = {
        'direcoes': int(direcoes.shape[0]),
        'monotona': testemunha is None,
        'tempo_testemunha': None if testemunha is None else testemunha[0],
        'direcao_testemunha': None if testemunha is None else direcoes[testemunha[1]],
        'conjugados': conjugados,
        'comprimento_minimo': min(comprimento for comprimento, _, _ in varreduras),
    }
    aprovado = testemunha is None and not any(conjugados)
    verificacoes = {}
    if parametros.get('testemunha_esperada') is not None:
        verificacoes['testemunha_esperada'] = (
            testemunha is not None
            and abs(testemunha[0] - parametros['testemunha_esperada']) <= parametros['tolerancia_testemunha']
        )

    curvatura_radial = m.oraculos.curvatura_radial
    if curvatura_radial is not None:
        raio = min(T, m.dominio.raio) if np.isfinite(m.dominio.raio) else T
        r = np.linspace(0.0, raio, 2001)[1:-1]
        curvaturas = np.asarray(curvatura_radial(r), dtype=float)
        escalares.update({
            'curvatura_radial_min': float(np.min(curvaturas)),
            'curvatura_radial_max': float(np.max(curvaturas)),
            'testemunhas_sinal': {
                'positiva': float(r[np.argmax(curvaturas)]) if np.max(curvaturas) > 0.0 else None,
                'negativa': float(r[np.argmin(curvaturas)]) if np.min(curvaturas) < 0.0 else None,
            },
        })
    if parametros['exigir_mudanca_sinal']:
        sinais = escalares.get('testemunhas_sinal') or {}
        verificacoes['mudanca_sinal_curvatura'] = bool(
            sinais.get('positiva') is not None and sinais.get('negativa') is not None
        )
    artefatos = [escrever_csv(
        contexto.arquivo('focal.csv'),
        ['direcao', 'comprimento', 'monotona', 'tempo_violacao', 'conjugados'],
        linhas,
    )]
    return ResultadoExecutor(aprovado, escalares, verificacoes, artefatos=artefatos)


# Busemann e convexidade

def _hessiano_esperado(m: VariedadeCarta, avaliacao) -> Optional[np.ndarray]:
    """Curvatura constante -k²: Hess b = k (g - db ⊗ db)"""
    curvatura = m.bandeiras.curvatura_constante
    if curvatura is None or curvatura > 0.0:
        return None
    db = avaliacao.metrica @ avaliacao.gradiente
    return np.sqrt(-curvatura) * (avaliacao.metrica - np.outer(db, db))


def executar_busemann(m: VariedadeCarta, parametros: Dict, contexto: ContextoExperimento) -> ResultadoExecutor:
    v = _direcao(m, m.origem, parametros)
    if parametros.get('ponto') is not None:
        pontos = _ponto(m, parametros)[None]
    else:
        pontos = amostrar_pontos_bola(
            m, parametros['raio'], parametros['pontos'], semente=contexto.semente, passo=parametros.get('passo'),
        )
    opcoes = dict(
        agenda=parametros.get('agenda'), tolerancia=parametros.get('tolerancia'),
        extrapolacao=parametros.get('extrapolacao'), passo=parametros.get('passo'),
    )

    def avaliar(indice: int):
        if indice < parametros['pontos_hessiano']:
            return hessiano_busemann(m, v, pontos[indice], agenda_estavel=parametros.get('agenda_estavel'), **opcoes)
        return gradiente_busemann(m, v, pontos[indice], **opcoes)

    avaliacoes = mapa_ordenado(avaliar, list(range(pontos.shape[0])), contexto.threads)
    oraculo = m.oraculos.busemann
    linhas, desvios_valor, desvios_hessiano, desvios_gradiente = [], [], [], []
    for ponto, avaliacao in zip(pontos, avaliacoes):
        esperado = float(oraculo(v, ponto)) if oraculo is not None else np.nan
        if oraculo is not None:
            desvios_valor.append(abs(avaliacao.valor - esperado))
        desvios_gradiente.append(abs(avaliacao.norma_gradiente - 1.0))
        if avaliacao.hessiano is not None:
            hessiano = _hessiano_esperado(m, avaliacao)
            if hessiano is not None:
                autovalores = autovalores_metricos(avaliacao.hessiano - hessiano, avaliacao.metrica)
                desvios_hessiano.append(float(np.max(np.abs(autovalores))))
        linhas.append([*ponto, avaliacao.valor, esperado, avaliacao.norma_gradiente, avaliacao.convergiu])

    nao_convergidas = sum(not avaliacao.convergiu for avaliacao in avaliacoes)
    nao_monotonas = sum(not avaliacao.monotona for avaliacao in avaliacoes)
    fora_da_cota = sum(not avaliacao.limitada for avaliacao in avaliacoes)
    escalares = {
        'pontos': int(pontos.shape[0]),
        'direcao': v,
        'desvio_valor_maximo': max(desvios_valor) if desvios_valor else None,
        'desvio_hessiano_maximo': max(desvios_hessiano) if desvios_hessiano else None,
        'desvio_norma_gradiente': max(desvios_gradiente),
        'nao_convergidas': nao_convergidas,
        'nao_monotonas': nao_monotonas,
        'fora_da_cota': fora_da_cota,
    }
    aprovado = (
        nao_convergidas == 0
        and escalares['desvio_norma_gradiente'] <= parametros['tolerancia_valor']
        and (not desvios_valor or escalares['desvio_valor_maximo'] <= parametros['tolerancia_valor'])
        and (not desvios_hessiano or escalares['desvio_hessiano_maximo'] <= parametros['tolerancia_hessiano'])
    )
    avisos = ['sequencia_busemann_nao_monotona'] if nao_monotonas else []
    if fora_da_cota:
        avisos.append('truncamento_busemann_fora_da_cota')
    cabecalho = [f'x{i}' for i in range(m.dim)] + ['valor', 'oraculo', 'norma_gradiente', 'convergiu']
    artefatos = [escrever_csv(contexto.arquivo('busemann.csv'), cabecalho, linhas)]
    return ResultadoExecutor(aprovado, escalares, avisos=avisos, artefatos=artefatos)


def executar_certificado_convexidade(m: VariedadeCarta, parametros: Dict,
                                     contexto: ContextoExperimento) -> ResultadoExecutor:
    construtor = MedidaFronteira.diadica if parametros['medida'] == 'diadica' else MedidaFronteira.uniforme
    medida = construtor(m, parametros['direcoes'], contexto.semente)
    pontos = amostrar_pontos_bola(
        m, parametros['raio'], parametros['pontos'], centro=parametros.get('ponto'), semente=contexto.semente,
        passo=parametros.get('passo'),
    )
    certificado = certificar_convexidade_estrita(
        m, parametros['funcao'], pontos, margem=parametros['margem'], medida=medida, threads=contexto.threads,
        comparar_medidas=parametros['comparar_medidas'], agenda=parametros.get('agenda'),
        agenda_estavel=parametros.get('agenda_estavel'),
    )
    escalares = certificado.como_dict()
    verificacoes = {}
    if parametros['funcao'] == 'averaged_F':
        p = _ponto(m, parametros)
        valor = funcao_media_F(
            m, medida, p, agenda=parametros.get('agenda'), agenda_estavel=parametros.get('agenda_estavel'),
            threads=contexto.threads,
        )
        escalares['laplaciano_F'] = valor.laplaciano
        if parametros.get('laplaciano_esperado') is not None:
            verificacoes['laplaciano_F'] = (
                abs(valor.laplaciano - parametros['laplaciano_esperado']) <= parametros['tolerancia_laplaciano']
            )
        if parametros['bilaplaciano']:
            escalares['bilaplaciano_F'] = bilaplaciano_F(
                m, medida, p, passo_malha=parametros['passo_malha'], agenda=parametros.get('agenda'),
                agenda_estavel=parametros.get('agenda_estavel'), threads=contexto.threads,
            )
            verificacoes['bilaplaciano_F'] = abs(escalares['bilaplaciano_F']) < parametros['limite_bilaplaciano']
    artefatos = [certificado.exportar_csv(contexto.arquivo('certificado.csv'))]
    return ResultadoExecutor(certificado.estrito, escalares, verificacoes, artefatos=artefatos)


def executar_constantes_radiais(m: VariedadeCarta, parametros: Dict, contexto: ContextoExperimento) -> ResultadoExecutor:
    p = _ponto(m, parametros)
    auditoria = None
    if parametros['auditar']:
        auditoria = auditar_curvatura_radial(
            m, p, amostras=parametros['amostras_auditoria'], t_max=parametros['t_max_auditoria'],
            passo=parametros.get('passo'), semente=contexto.semente,
        )
    constantes = constantes_teorema_radial(
        m, p, raio=parametros['raio'], direcoes=parametros['direcoes'], passo_radial=parametros['passo_radial'],
        semente=contexto.semente, auditoria=auditoria,
    )
    escalares = constantes.como_dict()
    if auditoria is not None:
        escalares['auditoria'] = auditoria.veredito
    verificacoes = {}
    if parametros.get('c1_esperado') is not None:
        verificacoes['c1_esperado'] = abs(constantes.c1 - parametros['c1_esperado']) <= parametros['tolerancia_c1']
    artefatos = [escrever_json(contexto.arquivo('constantes.json'), escalares)]
    return ResultadoExecutor(constantes.desigualdade_beta, escalares, verificacoes, artefatos=artefatos)


def executar_curva_integral(m: VariedadeCarta, parametros: Dict, contexto: ContextoExperimento) -> ResultadoExecutor:
    v = _direcao(m, m.origem, parametros)
    resultado = verificar_curva_integral(
        m, v, _ponto(m, parametros), T=parametros['T'], agenda=parametros.get('agenda'),
        tolerancia=parametros['tolerancia'], passo=parametros.get('passo'),
    )
    cabecalho = ['t'] + [f'fluxo{i}' for i in range(m.dim)] + [f'geodesica{i}' for i in range(m.dim)]
    artefatos = [escrever_csv(
        contexto.arquivo('curva_integral.csv'), cabecalho,
        ([t, *x, *y] for t, x, y in zip(resultado.tempos, resultado.fluxo, resultado.geodesica)),
    )]
    return ResultadoExecutor(resultado.aprovado, resultado.como_dict(), artefatos=artefatos)


def executar_razao_lambda(m: VariedadeCarta, parametros: Dict, contexto: ContextoExperimento) -> ResultadoExecutor:
    p = _ponto(m, parametros)
    auditoria = None
    if not parametros['diagnostico']:
        auditoria = auditar_curvatura_radial(
            m, p, amostras=parametros['amostras_auditoria'], t_max=parametros['t_max_auditoria'],
            passo=parametros.get('passo'), semente=contexto.semente,
        )
    if parametros.get('direcao') is not None:
        direcoes = _direcao(m, p, parametros)[None]
    else:
        direcoes = _direcoes(m, p, parametros['geodesicas'], contexto.semente)

    resultados = mapa_ordenado(
        lambda v: verificar_razao_lambda(
            m, p, v, parametros['t_max'], auditoria=auditoria, direcoes=parametros['direcoes'],
            diagnostico=parametros['diagnostico'], passo=parametros.get('passo'),
        ),
        list(direcoes),
        contexto.threads,
    )
    reprovados = [resultado for resultado in resultados if not resultado.aprovado]
    escalares = {
        'geodesicas': len(resultados),
        'excesso_maximo': max(resultado.excesso_maximo for resultado in resultados),
        'desvio_igualdade': max(resultado.desvio_igualdade for resultado in resultados),
        'truncadas': sum(resultado.truncado for resultado in resultados),
        'testemunha': reprovados[0].como_dict() if reprovados else None,
    }
    verificacoes = {}
    if parametros['igualdade']:
        verificacoes['igualdade'] = escalares['desvio_igualdade'] <= parametros['tolerancia_igualdade']
    avisos = ['geodesicas_truncadas'] if escalares['truncadas'] else []
    return ResultadoExecutor(not reprovados, escalares, verificacoes, avisos)


# Espectro

def executar_espectral(m: VariedadeCarta, parametros: Dict, contexto: ContextoExperimento) -> ResultadoExecutor:
    relatorio = relatorio_espectral(
        m, direcoes=parametros['direcoes'], quantidade_pontos=parametros['quantidade_pontos'],
        raio_pontos=parametros['raio_pontos'], raios=parametros['raios'], n_indice=parametros['n_indice'],
        raio=parametros.get('raio'), agenda=parametros.get('agenda'), agenda_estavel=parametros.get('agenda_estavel'),
        passo=parametros.get('passo'), ordem=parametros.get('ordem'), semente=contexto.semente,
        threads=contexto.threads,
    )
    completo = relatorio.como_dict()
    escalares = {chave: valor for chave, valor in completo.items() if chave != 'amostras_h'}
    verificacoes = {}
    if parametros.get('h_esperado') is not None:
        verificacoes['h_esperado'] = abs(relatorio.h_media - parametros['h_esperado']) <= parametros['tolerancia_h']
    if parametros.get('lambda0_esperado') is not None:
        esperado = parametros['lambda0_esperado']
        verificacoes['lambda0_esperado'] = (
            abs(relatorio.rayleigh.valor - esperado) <= parametros['tolerancia_lambda0'] * esperado
        )
    if parametros.get('razao_final_esperada') is not None:
        esperado = parametros['razao_final_esperada']
        verificacoes['razao_final_esperada'] = (
            abs(float(relatorio.cheeger.razoes[-1]) - esperado) <= parametros['tolerancia_razao'] * esperado
        )
    if parametros.get('dispersao_minima') is not None:
        verificacoes['dispersao_minima'] = relatorio.curvaturas.dispersao > parametros['dispersao_minima']

    n = m.dim
    artefatos = [
        relatorio.cheeger.exportar_csv(contexto.arquivo('cheeger.csv')),
        escrever_csv(
            contexto.arquivo('curvatura_media.csv'),
            [f'v{i}' for i in range(n)] + [f'x{i}' for i in range(n)] + ['h', 'h_tensor'],
            ([*a.direcao, *a.ponto, a.h, a.h_tensor] for a in relatorio.curvaturas.amostras),
        ),
        escrever_json(contexto.arquivo('espectral.json'), completo),
    ]
    return ResultadoExecutor(relatorio.aprovado, escalares, verificacoes, artefatos=artefatos)


def executar_faixa_essencial(m: VariedadeCarta, parametros: Dict, contexto: ContextoExperimento) -> ResultadoExecutor:
    if m.bandeiras.curvatura_constante != -1.0:
        raise ErroModeloNaoSuportado(f'A densidade |c(λ)|⁻² está disponível só para H^n: {m.nome}')
    h = parametros.get('h')
    if h is None:
        h = m.bandeiras.h_assintotico if m.bandeiras.h_assintotico is not None else float(m.dim - 1)
    densidade = densidade_funcao_c(m.dim, np.linspace(0.0, parametros['lambda_maximo'], parametros['pontos_lambda']))
    fundo = h * h / 4.0
    if parametros.get('x') is not None:
        x_grade = np.asarray(parametros['x'], dtype=float)
    else:
        largura = parametros['largura_x']
        x_grade = fundo + np.linspace(-0.5 * largura, 0.5 * largura, parametros['quantidade_x'])
    resultado = faixa_essencial(
        h, densidade, x_grade, parametros['epsilons'], passo_forca_bruta=parametros['passo_forca_bruta'],
        lambda_maximo=parametros['lambda_maximo'],
    )
    escalares = {
        'fundo': resultado.fundo,
        'pares': len(resultado.vereditos),
        'concordancia': resultado.concordancia,
        'fundo_correto': resultado.fundo_correto,
        'densidade': densidade.como_dict(),
    }
    verificacoes = {'limites_funcao_c': densidade.limites_verificados()}
    artefatos = [
        resultado.exportar_csv(contexto.arquivo('faixa_essencial.csv')),
        densidade.exportar_csv(contexto.arquivo('densidade_plancherel.csv')),
    ]
    return ResultadoExecutor(resultado.concordancia and resultado.fundo_correto, escalares, verificacoes,
                             artefatos=artefatos)


def executar_posto_superior(m: VariedadeCarta, parametros: Dict, contexto: ContextoExperimento) -> ResultadoExecutor:
    direcoes = parametros['direcoes']
    if parametros.get('angulos') is not None:
        angulos = np.asarray(parametros['angulos'], dtype=float)
        direcoes = direcoes_com_pesos(m, np.stack([np.cos(angulos), np.sin(angulos)], axis=-1), contexto.semente)
    resultado = verificacoes_posto_superior(
        m, direcoes, agenda=parametros.get('agenda'), agenda_estavel=parametros.get('agenda_estavel'),
        tolerancia=parametros.get('tolerancia'), passo=parametros.get('passo'), n_indice=parametros['n_indice'],
        raio=parametros['raio'], ordem=parametros['ordem'], passo_radial=parametros.get('passo_radial'),
    )
    escalares = resultado.como_dict()
    artefatos = [escrever_json(contexto.arquivo('posto_superior.json'), escalares)]
    return ResultadoExecutor(resultado.aprovado, escalares, artefatos=artefatos)


def executar_auditoria(m: VariedadeCarta, parametros: Dict, contexto: ContextoExperimento) -> ResultadoExecutor:
    auditoria = auditar_curvatura_radial(
        m, _ponto(m, parametros), amostras=parametros['amostras'], t_max=parametros['t_max'],
        passo=parametros.get('passo'), registros=parametros['registros'], semente=contexto.semente,
    )
    avisos = ['geodesicas_truncadas'] if auditoria.truncadas else []
    return ResultadoExecutor(auditoria.nao_positiva, auditoria.como_dict(), avisos=avisos)


def _forma_fechada_esferica(m: VariedadeCarta, frequencia: float, r: np.ndarray) -> Optional[np.ndarray]:
    """φ_λ em dimensão 3: sin(λr)/(λ sinh r) em H³ e sin(λr)/(λr) em R³"""
    curvatura = m.bandeiras.curvatura_constante
    if m.dim != 3 or curvatura not in (0.0, -1.0) or frequencia == 0.0:
        return None
    denominador = np.sinh(r) if curvatura == -1.0 else r
    return np.sin(frequencia * r) / (frequencia * denominador)


def executar_funcao_esferica(m: VariedadeCarta, parametros: Dict, contexto: ContextoExperimento) -> ResultadoExecutor:
    pontos = None
    if parametros['pontos_relacao']:
        pontos = amostrar_pontos_bola(
            m, parametros['raio_relacao'], parametros['pontos_relacao'], semente=contexto.semente,
            passo=parametros.get('passo'),
        )
    frequencias, artefatos = [], []
    aprovado = True
    for indice, frequencia in enumerate(parametros['frequencias']):
        perfil = funcao_esferica(m, frequencia, r_max=parametros['r_max'], pontos=parametros['pontos'])
        item = {'frequencia': frequencia, 'autovalor': perfil.autovalor, 'residuo_edo': perfil.residuo}
        esperado = _forma_fechada_esferica(m, frequencia, perfil.r[1:])
        if esperado is not None:
            item['desvio_forma_fechada'] = float(np.max(np.abs(perfil.valores[1:] - esperado)))
            aprovado = aprovado and item['desvio_forma_fechada'] <= parametros['tolerancia_forma_fechada']
        if pontos is not None:
            quocientes = verificar_relacao_autovalor(m, perfil, pontos, parametros['passo_laplaciano'])
            item['desvio_autovalor'] = float(np.max(np.abs(quocientes - perfil.autovalor)))
            aprovado = aprovado and item['desvio_autovalor'] <= parametros['tolerancia_autovalor']
        frequencias.append(item)
        artefatos.append(perfil.exportar_csv(contexto.arquivo(f'funcao_esferica_{indice}.csv')))
    escalares = {'h': m.bandeiras.h_assintotico, 'frequencias': frequencias}
    return ResultadoExecutor(aprovado, escalares, artefatos=artefatos)


def executar_radializacao(m: VariedadeCarta, parametros: Dict, contexto: ContextoExperimento) -> ResultadoExecutor:
    centro = _ponto(m, parametros, 'centro')
    f = funcao_suporte_compacto(m, centro, parametros['raio_suporte'])
    raio = parametros['raio']
    perfil = perfil_radial(m, None, raio, parametros.get('passo'), parametros['ordem'])
    uma = radializar(m, None, f, raio, perfil=perfil)
    duas = radializar(m, None, uma.como_funcao(m), raio, perfil=perfil)
    comutacao = residuo_comutacao(m, None, f, raio, verificacoes=parametros['verificacoes'], perfil=perfil)
    escalares = {
        'desvio_idempotencia': float(np.max(np.abs(duas.valores - uma.valores))),
        'residuo_comutacao': comutacao.residuo,
        'raios_verificacao': comutacao.r,
    }
    aprovado = (
        comutacao.residuo < parametros['limite_comutacao']
        and escalares['desvio_idempotencia'] <= parametros['tolerancia_idempotencia']
    )
    verificacoes = {}
    if parametros.get('residuo_minimo') is not None:
        verificacoes['residuo_minimo'] = comutacao.residuo > parametros['residuo_minimo']
    artefatos = [escrever_csv(contexto.arquivo('radializacao.csv'), ['r', 'valor'], zip(uma.r, uma.valores))]
    return ResultadoExecutor(aprovado, escalares, verificacoes, artefatos=artefatos)


EXECUTORES: Dict[str, Callable[[VariedadeCarta, Dict, ContextoExperimento], ResultadoExecutor]] = {
    'geodesic': executar_geodesica,
    'jacobi': executar_jacobi,
    'focal-scan': executar_varredura_focal,
    'busemann': executar_busemann,
    'convexity-cert': executar_certificado_convexidade,
    'radial-constants': executar_constantes_radiais,
    'spectral': executar_espectral,
    'essential-range': executar_faixa_essencial,
    'rank-checks': executar_posto_superior,
    'curvature-audit': executar_auditoria,
    'lambda-ratio': executar_razao_lambda,
    'spherical': executar_funcao_esferica,
    'radialisation': executar_radializacao,
    'integral-curve': executar_curva_integral,
}
