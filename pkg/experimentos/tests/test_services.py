"""
Testes da execução de configurações, manifesto e registro no banco
"""
import json

import pytest

from core.excecoes import ErroConfiguracao
from experimentos.models import ExecucaoExperimento, StatusExecucao, Veredito
from experimentos.services import (
    ManifestoExecucao, ResultadoItem, carregar_configuracao, executar_configuracao, validar_configuracao,
    verificar_determinismo,
)
from tests.factories import ConfiguracaoFactory, ExperimentoFactory


@pytest.fixture
def configuracao():
    return ConfiguracaoFactory(nome='servico')


@pytest.fixture
def configuracao_com_erro():
    return ConfiguracaoFactory(
        nome='com_erro',
        experimentos=[
            ExperimentoFactory(nome='faixa_no_plano', tipo='essential-range', parametros={}),
            ExperimentoFactory(nome='focal_plano'),
        ],
    )


@pytest.mark.unit
class TestCarregarConfiguracao:
    """Testes da leitura do arquivo de configuração"""

    def test_arquivo_inexistente(self, tmp_path):
        """Testa erro com caminho 'arquivo'"""
        with pytest.raises(ErroConfiguracao) as erro:
            carregar_configuracao(tmp_path / 'nada.json')
        assert 'arquivo' in erro.value.erros

    def test_json_invalido(self, tmp_path):
        """Testa linha e coluna do erro de sintaxe"""
        caminho = tmp_path / 'quebrado.json'
        caminho.write_text('{"nome": ', encoding='utf-8')
        with pytest.raises(ErroConfiguracao) as erro:
            carregar_configuracao(caminho)
        assert 'linha 1' in erro.value.erros['arquivo'][0]

    def test_lista_no_topo(self, tmp_path):
        """Testa configuração que não é objeto"""
        caminho = tmp_path / 'lista.json'
        caminho.write_text('[]', encoding='utf-8')
        with pytest.raises(ErroConfiguracao):
            carregar_configuracao(caminho)


@pytest.mark.unit
class TestValidarConfiguracao:
    """Testes da validação com caminhos de campo"""

    def test_padroes_em_dicts_simples(self, configuracao):
        """Testa padrões preenchidos e tipos JSON simples"""
        validada = validar_configuracao(configuracao)
        assert type(validada['experimentos'][0]['parametros']) is dict
        assert validada['threads'] == 1
        assert validada['experimentos'][0]['parametros']['esperar_aprovado'] is True

    def test_erro_com_caminho(self, configuracao):
        """Testa ErroConfiguracao com os caminhos achatados"""
        configuracao['experimentos'][0]['parametros']['T'] = -1.0
        with pytest.raises(ErroConfiguracao) as erro:
            validar_configuracao(configuracao)
        assert erro.value.erros == {'experimentos[0].parametros.T': ['Deve ser positivo.']}


@pytest.mark.unit
class TestExecutarConfiguracao:
    """Testes da execução sem registro no banco"""

    def test_manifesto_e_relatorios(self, configuracao, tmp_path):
        """Testa arquivos gravados e veredito aprovado"""
        manifesto = executar_configuracao(configuracao, saida=tmp_path, registrar=False)
        assert manifesto.aprovado
        assert manifesto.codigo_saida() == 0
        dados = json.loads((tmp_path / 'manifesto.json').read_text())
        nome = configuracao['experimentos'][0]['nome']
        assert [item['nome'] for item in dados['resultados']] == [nome]
        assert dados['resultados'][0]['veredito'] == 'pass'
        assert len(dados['hash_configuracao']) == 64
        assert 'tempo_parede' not in dados
        assert (tmp_path / 'tempos.json').exists()
        assert (tmp_path / f'00_{nome}' / 'resultado.json').exists()
        assert (tmp_path / f'00_{nome}' / 'focal.csv').exists()

    def test_erro_registrado_e_execucao_continua(self, configuracao_com_erro, tmp_path):
        """Testa erro numérico no manifesto sem interromper os demais"""
        manifesto = executar_configuracao(configuracao_com_erro, saida=tmp_path, registrar=False)
        vereditos = [resultado.veredito for resultado in manifesto.resultados]
        assert vereditos == [Veredito.ERRO, Veredito.APROVADO]
        assert manifesto.resultados[0].erro['codigo'] == 'modelo_nao_suportado'
        assert manifesto.codigo_saida() == 1
        resultado = json.loads((tmp_path / '00_faixa_no_plano' / 'resultado.json').read_text())
        assert resultado['erro']['codigo'] == 'modelo_nao_suportado'

    def test_esperar_reprovacao(self, tmp_path):
        """Testa S² reprovada como esperado contando como aprovação"""
        dados = ConfiguracaoFactory(experimentos=[ExperimentoFactory(
            nome='focal_s2', modelo={'tipo': 'sphere2'},
            parametros={'direcoes': 1, 'T': 3.0, 'esperar_aprovado': False},
        )])
        manifesto = executar_configuracao(dados, saida=tmp_path, registrar=False)
        assert manifesto.aprovado
        assert manifesto.resultados[0].escalares['aprovado_bruto'] is False

    def test_modo_estrito_com_avisos(self, tmp_path):
        """Testa avisos reprovando apenas no modo estrito"""
        manifesto = ManifestoExecucao(
            nome='avisos', hash_configuracao='0' * 64, versoes={}, semente=0, threads=1, diretorio=tmp_path,
            resultados=[ResultadoItem(
                ordem=0, nome='truncada', tipo='geodesic', modelo='sphere2', veredito=Veredito.APROVADO,
                avisos=['geodesica_truncada'],
            )],
        )
        assert manifesto.avisos == ['truncada: geodesica_truncada']
        assert manifesto.codigo_saida(estrito=False) == 0
        assert manifesto.codigo_saida(estrito=True) == 1

    def test_hash_ignora_threads_e_saida(self, configuracao, tmp_path):
        """Testa hash igual com threads e diretórios diferentes e diferente com outra semente"""
        um = executar_configuracao(configuracao, threads=1, saida=tmp_path / 'a', registrar=False)
        dois = executar_configuracao(configuracao, threads=3, saida=tmp_path / 'b', registrar=False)
        tres = executar_configuracao(configuracao, semente=7, saida=tmp_path / 'c', registrar=False)
        assert um.hash_configuracao == dois.hash_configuracao
        assert um.hash_configuracao != tres.hash_configuracao
        assert tres.semente == 7

    def test_configuracao_invalida(self, tmp_path):
        """Testa ErroConfiguracao antes de qualquer experimento"""
        with pytest.raises(ErroConfiguracao):
            executar_configuracao({'nome': 'vazia', 'experimentos': []}, saida=tmp_path, registrar=False)
        assert not (tmp_path / 'manifesto.json').exists()


@pytest.mark.unit
class TestDeterminismo:
    """Testes da verificação de determinismo"""

    def test_relatorios_identicos(self, tmp_path):
        """Testa bytes iguais em duas execuções seriais e uma paralela"""
        dados = ConfiguracaoFactory(experimentos=[
            ExperimentoFactory(nome='focal', parametros={'direcoes': 4, 'T': 2.0}),
            ExperimentoFactory(nome='auditoria', tipo='curvature-audit', modelo={'tipo': 'hyperbolic_ball'},
                               parametros={'amostras': 4, 't_max': 1.0}),
        ])
        resultado = verificar_determinismo(dados, tmp_path, threads=3)
        assert resultado == {'repeticao': [], 'threads': [], 'deterministico': True}


@pytest.mark.django_db
class TestRegistroNoBanco:
    """Testes da persistência das execuções"""

    def test_execucao_e_resultados(self, configuracao_com_erro, tmp_path):
        """Testa registro da execução reprovada com um resultado por experimento"""
        manifesto = executar_configuracao(configuracao_com_erro, saida=tmp_path, registrar=True)
        execucao = ExecucaoExperimento.objects.get(pk=manifesto.registro_id)
        assert execucao.status == StatusExecucao.REPROVADA
        assert not execucao.aprovada
        assert execucao.hash_configuracao == manifesto.hash_configuracao
        assert execucao.concluida_em is not None
        assert 'faixa_no_plano' in execucao.mensagem_erro
        resultados = list(execucao.resultados.all())
        assert [resultado.nome for resultado in resultados] == ['faixa_no_plano', 'focal_plano']
        assert resultados[0].veredito == Veredito.ERRO
        assert resultados[1].escalares['monotona'] is True

    def test_sem_registro(self, configuracao, tmp_path):
        """Testa execução sem gravar no banco"""
        manifesto = executar_configuracao(configuracao, saida=tmp_path, registrar=False)
        assert manifesto.registro_id is None
        assert ExecucaoExperimento.objects.count() == 0
