"""
Execução de configurações de experimentos.

Carrega e valida a configuração, executa cada experimento em ordem gravando
``resultado.json`` no seu subdiretório, escreve o manifesto determinístico da
execução e registra a execução no banco quando habilitado.
"""

import json
import logging
import platform
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import django
import numpy as np
import scipy
from django.db import DatabaseError, transaction
from django.utils import timezone

import laboratorio_geometrico
from core.configuracao import parametro
from core.excecoes import ErroConfiguracao, ErroLaboratorio
from core.paralelo import resolver_threads
from core.relatorios import dumps_json, escrever_json, hash_configuracao
from variedades.registro import construir_modelo

from .executores import EXECUTORES, ContextoExperimento
from .models import ExecucaoExperimento, ResultadoExperimento, StatusExecucao, Veredito
from .serializers import ConfiguracaoSerializer, achatar_erros

logger = logging.getLogger('laboratorio.experimentos')


def carregar_configuracao(caminho) -> Dict:
    """Lê o arquivo JSON de configuração"""
    caminho = Path(caminho)
    try:
        dados = json.loads(caminho.read_text(encoding='utf-8'))
    except OSError as erro:
        raise ErroConfiguracao(
            f'Não foi possível ler {caminho}', {'arquivo': [str(erro)]}
        ) from erro
    except json.JSONDecodeError as erro:
        raise ErroConfiguracao(
            f'JSON inválido em {caminho}', {'arquivo': [f'linha {erro.lineno}, coluna {erro.colno}: {erro.msg}']}
        ) from erro
    if not isinstance(dados, dict):
        raise ErroConfiguracao('A configuração deve ser um objeto JSON', {'arquivo': ['Esperado um objeto.']})
    return dados


def validar_configuracao(dados: Dict) -> Dict:
    """Valida ``dados`` e devolve a configuração com os padrões preenchidos"""
    serializer = ConfiguracaoSerializer(data=dados)
    if not serializer.is_valid():
        erros = achatar_erros(serializer.errors)
        raise ErroConfiguracao(f'Configuração inválida: {len(erros)} campo(s) com erro', erros)
    # dicts simples, sem OrderedDict/ReturnDict
    return json.loads(json.dumps(serializer.validated_data))


@dataclass
class ResultadoItem:
    ordem: int
    nome: str
    tipo: str
    modelo: Optional[str]
    veredito: str
    escalares: Dict[str, Any] = field(default_factory=dict)
    verificacoes: Dict[str, bool] = field(default_factory=dict)
    avisos: List[str] = field(default_factory=list)
    artefatos: List[str] = field(default_factory=list)
    erro: Optional[Dict] = None
    tempo_parede: float = 0.0

    @property
    def aprovado(self) -> bool:
        return self.veredito == Veredito.APROVADO

    def como_dict(self) -> Dict:
        return {
            'ordem': self.ordem,
            'nome': self.nome,
            'tipo': self.tipo,
            'modelo': self.modelo,
            'veredito': self.veredito,
            'escalares': self.escalares,
            'verificacoes': self.verificacoes,
            'avisos': self.avisos,
            'artefatos': self.artefatos,
            'erro': self.erro,
        }


@dataclass
class ManifestoExecucao:
    nome: str
    hash_configuracao: str
    versoes: Dict[str, str]
    semente: int
    threads: int
    diretorio: Path
    resultados: List[ResultadoItem] = field(default_factory=list)
    tempo_parede: float = 0.0
    registro_id: Optional[str] = None

    @property
    def aprovado(self) -> bool:
        return all(resultado.aprovado for resultado in self.resultados)

    @property
    def avisos(self) -> List[str]:
        return [f'{resultado.nome}: {aviso}' for resultado in self.resultados for aviso in resultado.avisos]

    def codigo_saida(self, estrito: bool = False) -> int:
        """0 se tudo passou; 1 com falha ou erro; com ``estrito`` avisos também reprovam"""
        if not self.aprovado:
            return 1
        if estrito and self.avisos:
            return 1
        return 0

    def como_dict(self) -> Dict:
        # sem tempos de parede nem caminhos absolutos: o manifesto é comparado byte a byte
        return {
            'nome': self.nome,
            'hash_configuracao': self.hash_configuracao,
            'versoes': self.versoes,
            'semente': self.semente,
            'aprovado': self.aprovado,
            'resultados': [
                {
                    'nome': resultado.nome,
                    'tipo': resultado.tipo,
                    'veredito': resultado.veredito,
                    'avisos': resultado.avisos,
                    'diretorio': _subdiretorio(resultado),
                }
                for resultado in self.resultados
            ],
        }


def _subdiretorio(resultado: ResultadoItem) -> str:
    return f'{resultado.ordem:02d}_{resultado.nome}'


def versoes() -> Dict[str, str]:
    return {
        'laboratorio': laboratorio_geometrico.__version__,
        'numpy': np.__version__,
        'scipy': scipy.__version__,
        'django': django.get_version(),
        'python': platform.python_version(),
    }


def _executar_item(ordem: int, experimento: Dict, modelo_global: Optional[Dict], diretorio: Path,
                   semente: int, threads: int) -> ResultadoItem:
    especificacao_modelo = experimento.get('modelo') or modelo_global
    resultado = ResultadoItem(
        ordem=ordem,
        nome=experimento['nome'],
        tipo=experimento['tipo'],
        modelo=especificacao_modelo['tipo'] if especificacao_modelo else None,
        veredito=Veredito.ERRO,
    )
    contexto = ContextoExperimento(
        nome=experimento['nome'], diretorio=diretorio / _subdiretorio(resultado), semente=semente, threads=threads,
    )
    contexto.diretorio.mkdir(parents=True, exist_ok=True)
    parametros = dict(experimento['parametros'])
    esperar_aprovado = parametros.pop('esperar_aprovado', True)
    inicio = time.perf_counter()
    try:
        modelo = construir_modelo(especificacao_modelo)
        saida = EXECUTORES[experimento['tipo']](modelo, parametros, contexto)
    except ErroLaboratorio as erro:
        resultado.erro = erro.como_dict()
        logger.warning(
            f"Experimento com erro | Nome: {resultado.nome} | Código: {erro.codigo} | {erro.mensagem}",
            extra={'experimento': resultado.nome, 'erro': resultado.erro},
        )
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as erro:
        resultado.erro = {'codigo': type(erro).__name__, 'mensagem': str(erro), 'detalhes': {}}
        logger.exception(
            f"Falha numérica inesperada | Nome: {resultado.nome} | {erro}",
            extra={'experimento': resultado.nome},
        )
    else:
        resultado.escalares = saida.escalares
        resultado.verificacoes = saida.verificacoes
        resultado.avisos = list(saida.avisos)
        resultado.artefatos = sorted(Path(artefato).name for artefato in saida.artefatos)
        resultado.escalares['aprovado_bruto'] = saida.aprovado
        aprovado = saida.aprovado == esperar_aprovado and all(saida.verificacoes.values())
        resultado.veredito = Veredito.APROVADO if aprovado else Veredito.REPROVADO
        logger.info(
            f"Experimento concluído | Nome: {resultado.nome} | Tipo: {resultado.tipo} | "
            f"Veredito: {resultado.veredito}",
            extra={'experimento': resultado.nome, 'verificacoes': saida.verificacoes, 'avisos': saida.avisos},
        )
    resultado.tempo_parede = time.perf_counter() - inicio
    escrever_json(contexto.arquivo('resultado.json'), resultado.como_dict())
    return resultado


def _registrar_inicio(configuracao: Dict, manifesto: ManifestoExecucao) -> Optional[ExecucaoExperimento]:
    try:
        return ExecucaoExperimento.objects.create(
            nome=manifesto.nome,
            configuracao=configuracao,
            hash_configuracao=manifesto.hash_configuracao,
            versoes=manifesto.versoes,
            semente=manifesto.semente,
            threads=manifesto.threads,
            diretorio_saida=str(manifesto.diretorio),
        )
    except DatabaseError as erro:
        logger.warning(f"Execução não registrada no banco | Nome: {manifesto.nome} | {erro}")
        return None


def _registrar_conclusao(execucao: ExecucaoExperimento, manifesto: ManifestoExecucao):
    try:
        with transaction.atomic():
            execucao.status = StatusExecucao.APROVADA if manifesto.aprovado else StatusExecucao.REPROVADA
            execucao.concluida_em = timezone.now()
            execucao.tempo_parede = manifesto.tempo_parede
            execucao.mensagem_erro = '\n'.join(
                f"{resultado.nome}: {resultado.erro['mensagem']}" for resultado in manifesto.resultados
                if resultado.erro
            )
            execucao.save()
            ResultadoExperimento.objects.bulk_create([
                ResultadoExperimento(
                    execucao=execucao,
                    ordem=resultado.ordem,
                    nome=resultado.nome,
                    tipo=resultado.tipo,
                    veredito=resultado.veredito,
                    escalares=json.loads(dumps_json(resultado.escalares)),
                    avisos=resultado.avisos,
                    mensagem_erro=resultado.erro['mensagem'] if resultado.erro else '',
                )
                for resultado in manifesto.resultados
            ])
    except DatabaseError as erro:
        logger.warning(f"Resultados não registrados no banco | Execução: {execucao.pk} | {erro}")


def executar_configuracao(dados: Dict, threads: int = None, semente: int = None, saida=None,
                          registrar: bool = None) -> ManifestoExecucao:
    """
    Valida e executa ``dados``. ``threads``, ``semente`` e ``saida`` sobrepõem
    os valores da configuração. Erros de um experimento são registrados no seu
    resultado e a execução continua com o próximo.
    """
    configuracao = validar_configuracao(dados)
    if semente is not None:
        configuracao['semente'] = int(semente)
    threads = resolver_threads(threads if threads is not None else configuracao['threads'])
    diretorio = Path(saida or configuracao.get('saida') or Path(parametro('DIRETORIO_SAIDA')) / configuracao['nome'])
    diretorio.mkdir(parents=True, exist_ok=True)
    registrar = parametro('REGISTRAR_EXECUCOES') if registrar is None else registrar

    identidade = {chave: valor for chave, valor in configuracao.items() if chave not in ('threads', 'saida')}
    manifesto = ManifestoExecucao(
        nome=configuracao['nome'],
        hash_configuracao=hash_configuracao(identidade),
        versoes=versoes(),
        semente=configuracao['semente'],
        threads=threads,
        diretorio=diretorio,
    )
    logger.info(
        f"Execução iniciada | Nome: {manifesto.nome} | Experimentos: {len(configuracao['experimentos'])} | "
        f"Threads: {threads}",
        extra={'hash': manifesto.hash_configuracao, 'semente': manifesto.semente},
    )
    execucao = _registrar_inicio(configuracao, manifesto) if registrar else None

    inicio = time.perf_counter()
    for ordem, experimento in enumerate(configuracao['experimentos']):
        manifesto.resultados.append(_executar_item(
            ordem, experimento, configuracao.get('modelo'), diretorio, manifesto.semente, threads,
        ))
    manifesto.tempo_parede = time.perf_counter() - inicio

    escrever_json(diretorio / 'manifesto.json', manifesto.como_dict())
    escrever_json(diretorio / 'tempos.json', {
        'total': manifesto.tempo_parede,
        'threads': threads,
        'experimentos': {resultado.nome: resultado.tempo_parede for resultado in manifesto.resultados},
    })
    if execucao is not None:
        _registrar_conclusao(execucao, manifesto)
        manifesto.registro_id = str(execucao.pk)

    logger.info(
        f"Execução concluída | Nome: {manifesto.nome} | Aprovada: {manifesto.aprovado} | "
        f"Tempo: {manifesto.tempo_parede:.2f}s",
        extra={'hash': manifesto.hash_configuracao, 'avisos': manifesto.avisos},
    )
    return manifesto


def _arquivos_relatorio(diretorio: Path) -> Dict[str, bytes]:
    """Bytes dos relatórios determinísticos (tudo exceto tempos.json)"""
    return {
        str(caminho.relative_to(diretorio)): caminho.read_bytes()
        for caminho in sorted(diretorio.rglob('*'))
        if caminho.is_file() and caminho.name != 'tempos.json'
    }


def verificar_determinismo(configuracao: Dict, diretorio, threads: int = 4) -> Dict:
    """
    Executa a configuração duas vezes com 1 thread e uma vez com ``threads``
    e compara os relatórios byte a byte. Devolve as listas de arquivos que
    divergem em cada comparação.
    """
    diretorio = Path(diretorio)
    arquivos = {}
    for rotulo, quantidade in (('serial_a', 1), ('serial_b', 1), ('paralela', threads)):
        executar_configuracao(configuracao, threads=quantidade, saida=diretorio / rotulo, registrar=False)
        arquivos[rotulo] = _arquivos_relatorio(diretorio / rotulo)

    def divergentes(a: Dict[str, bytes], b: Dict[str, bytes]) -> List[str]:
        return sorted(nome for nome in set(a) | set(b) if a.get(nome) != b.get(nome))

    resultado = {
        'repeticao': divergentes(arquivos['serial_a'], arquivos['serial_b']),
        'threads': divergentes(arquivos['serial_a'], arquivos['paralela']),
    }
    resultado['deterministico'] = not resultado['repeticao'] and not resultado['threads']
    logger.info(
        f"Verificação de determinismo | Nome: {configuracao.get('nome')} | "
        f"Determinístico: {resultado['deterministico']}",
        extra=resultado,
    )
    return resultado
