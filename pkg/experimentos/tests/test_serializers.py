"""
Testes da validação de configurações
"""
import pytest

from experimentos.serializers import (
    ConfiguracaoSerializer, ExperimentoSerializer, ModeloSerializer, achatar_erros,
)
from experimentos.suites import SUITES
from tests.factories import ConfiguracaoFactory, ExperimentoFactory, ModeloFactory


def _erros(dados):
    serializer = ConfiguracaoSerializer(data=dados)
    assert not serializer.is_valid()
    return achatar_erros(serializer.errors)


@pytest.mark.unit
class TestModeloSerializer:
    """Testes da especificação de modelos"""

    def test_modelo_desconhecido_lista_opcoes(self):
        """Testa mensagem que nomeia os modelos válidos"""
        serializer = ModeloSerializer(data={'tipo': 'toro'})
        assert not serializer.is_valid()
        mensagem = str(serializer.errors['tipo'][0])
        assert '"toro" não é um modelo registrado' in mensagem
        for nome in ('euclidean', 'hyperbolic_ball', 'sphere2', 'warped', 'product'):
            assert nome in mensagem

    def test_produto_exige_dois_fatores(self):
        """Testa produto com um único fator"""
        serializer = ModeloSerializer(data={'tipo': 'product', 'fatores': [{'tipo': 'euclidean'}]})
        assert not serializer.is_valid()
        assert 'fatores' in serializer.errors

    def test_fator_invalido_indexado(self):
        """Testa erro do fator reportado pelo índice"""
        serializer = ModeloSerializer(data={
            'tipo': 'product', 'fatores': [{'tipo': 'euclidean'}, {'tipo': 'klein'}],
        })
        assert not serializer.is_valid()
        assert 'fatores[1].tipo' in achatar_erros(serializer.errors)

    def test_perfil_torcido_invalido(self):
        """Testa perfil desconhecido reportado em parametros"""
        serializer = ModeloSerializer(data={'tipo': 'warped', 'parametros': {'perfil': 'cosh'}})
        assert not serializer.is_valid()
        assert 'parametros' in serializer.errors

    def test_tolerancia_negativa(self):
        """Testa tolerância de modelo não positiva"""
        serializer = ModeloSerializer(data={'tipo': 'euclidean', 'tolerancias': {'busemann': -1.0}})
        assert not serializer.is_valid()
        assert achatar_erros(serializer.errors) == {'tolerancias.busemann': ['Deve ser positivo.']}


@pytest.mark.unit
class TestExperimentoSerializer:
    """Testes dos parâmetros por tipo de experimento"""

    def test_padroes_preenchidos(self):
        """Testa padrões do tipo geodesic"""
        serializer = ExperimentoSerializer(data={'nome': 'g', 'tipo': 'geodesic', 'parametros': {}})
        assert serializer.is_valid(), serializer.errors
        parametros = serializer.validated_data['parametros']
        assert parametros['T'] == 5.0
        assert parametros['tolerancia'] == 1e-6
        assert parametros['esperar_aprovado'] is True

    def test_parametro_desconhecido(self):
        """Testa rejeição de chave fora do esquema"""
        serializer = ExperimentoSerializer(data={'nome': 'g', 'tipo': 'geodesic', 'parametros': {'raio': 2}})
        assert not serializer.is_valid()
        assert achatar_erros(serializer.errors) == {'parametros.raio': ['Parâmetro desconhecido.']}

    def test_tipo_desconhecido(self):
        """Testa mensagem do tipo inválido"""
        serializer = ExperimentoSerializer(data={'nome': 'g', 'tipo': 'ricci-flow'})
        assert not serializer.is_valid()
        assert 'não é um tipo de experimento' in str(serializer.errors['tipo'][0])

    def test_s_maior_que_T(self):
        """Testa s fora de (0, T] no tipo jacobi"""
        serializer = ExperimentoSerializer(data={'nome': 'j', 'tipo': 'jacobi', 'parametros': {'T': 2.0, 's': 3.0}})
        assert not serializer.is_valid()
        assert 'parametros.s' in achatar_erros(serializer.errors)

    def test_nome_com_espaco(self):
        """Testa nome fora do padrão de arquivos"""
        serializer = ExperimentoSerializer(data={'nome': 'dois nomes', 'tipo': 'geodesic'})
        assert not serializer.is_valid()
        assert 'nome' in serializer.errors


@pytest.mark.unit
class TestConfiguracaoSerializer:
    """Testes da configuração completa"""

    def test_configuracao_padrao_valida(self):
        """Testa que a configuração padrão passa na validação"""
        serializer = ConfiguracaoSerializer(data=SUITES['padrao']())
        assert serializer.is_valid(), serializer.errors

    @pytest.mark.parametrize('nome', sorted(SUITES))
    def test_suites_validas(self, nome):
        """Testa que toda suíte nomeada é uma configuração válida"""
        serializer = ConfiguracaoSerializer(data=SUITES[nome]())
        assert serializer.is_valid(), achatar_erros(serializer.errors)

    def test_tolerancia_negativa_caminho_do_campo(self):
        """Testa caminho experimentos[0].parametros.tolerancia"""
        dados = ConfiguracaoFactory(experimentos=[
            ExperimentoFactory(tipo='geodesic', parametros={'tolerancia': -1e-6}),
        ])
        assert _erros(dados) == {'experimentos[0].parametros.tolerancia': ['Deve ser positivo.']}

    def test_modelo_desconhecido_caminho_do_campo(self):
        """Testa caminho do erro de modelo dentro do experimento"""
        dados = ConfiguracaoFactory(experimentos=[ExperimentoFactory(modelo=ModeloFactory(tipo='toro'))])
        erros = _erros(dados)
        assert list(erros) == ['experimentos[0].modelo.tipo']
        assert 'Opções válidas' in erros['experimentos[0].modelo.tipo'][0]

    def test_nomes_repetidos(self):
        """Testa nomes de experimento duplicados"""
        dados = ConfiguracaoFactory(experimentos=[
            ExperimentoFactory(nome='a'), ExperimentoFactory(nome='a'),
        ])
        assert 'experimentos' in _erros(dados)

    def test_sem_experimentos(self):
        """Testa lista vazia de experimentos"""
        assert 'experimentos' in _erros(ConfiguracaoFactory(experimentos=[]))

    def test_modelo_global_dispensa_modelo_local(self):
        """Testa experimento sem modelo quando há modelo global"""
        experimento = ExperimentoFactory()
        del experimento['modelo']
        serializer = ConfiguracaoSerializer(data={
            'nome': 'global', 'modelo': {'tipo': 'euclidean', 'dimensao': 3}, 'experimentos': [experimento],
        })
        assert serializer.is_valid(), serializer.errors

    def test_sem_modelo_algum(self):
        """Testa experimento sem modelo e sem modelo global"""
        experimento = ExperimentoFactory()
        del experimento['modelo']
        assert 'experimentos[0].modelo' in _erros(ConfiguracaoFactory(experimentos=[experimento]))

    def test_semente_negativa(self):
        """Testa semente fora do domínio"""
        assert 'semente' in _erros(ConfiguracaoFactory(semente=-1))


@pytest.mark.unit
class TestAchatarErros:
    """Testes do achatamento dos erros do DRF"""

    def test_lista_de_dicts_ignora_itens_validos(self):
        """Testa índices de itens sem erro omitidos"""
        erros = {'experimentos': [{}, {'nome': ['Inválido.']}]}
        assert achatar_erros(erros) == {'experimentos[1].nome': ['Inválido.']}

    def test_erro_sem_campo(self):
        """Testa non_field_errors no nível raiz"""
        assert achatar_erros({'non_field_errors': ['Falhou.']}) == {'configuracao': ['Falhou.']}
