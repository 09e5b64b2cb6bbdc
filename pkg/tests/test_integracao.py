"""
Testes de integração: suítes de aceitação executadas de ponta a ponta
"""
import json

import pytest

from experimentos.models import Veredito
from experimentos.services import executar_configuracao
from experimentos.suites import SUITES
from tests.factories import ConfiguracaoFactory, ExperimentoFactory


@pytest.fixture
def passo_fino(settings):
    """Passo de integração de produção para os limiares de aceitação"""
    settings.LABORATORIO = {**settings.LABORATORIO, 'PASSO_INTEGRACAO': 1e-3}


def executar_suite(nome, saida):
    manifesto = executar_configuracao(SUITES[nome](), saida=saida, registrar=False)
    falhas = {
        resultado.nome: resultado.erro or resultado.verificacoes
        for resultado in manifesto.resultados if resultado.veredito != Veredito.APROVADO
    }
    return manifesto, falhas


@pytest.mark.integration
class TestFluxoConfiguracao:
    """Testa o fluxo arquivo → validação → execução → relatórios"""

    def test_modelo_global_e_varios_tipos(self, tmp_path):
        """Testa configuração com modelo global compartilhado por três tipos"""
        dados = {
            'nome': 'global_h2',
            'semente': 3,
            'modelo': {'tipo': 'hyperbolic_ball', 'dimensao': 2},
            'experimentos': [
                {'nome': 'auditoria', 'tipo': 'curvature-audit', 'parametros': {'amostras': 4, 't_max': 2.0}},
                {'nome': 'focal', 'tipo': 'focal-scan', 'parametros': {'direcoes': 2, 'T': 3.0}},
                {'nome': 'geodesica', 'tipo': 'geodesic',
                 'parametros': {'destino': [0.2, 0.2], 'tolerancia': 1e-5, 'tolerancia_distancia': 1e-6}},
            ],
        }
        manifesto = executar_configuracao(dados, saida=tmp_path, registrar=False)
        assert manifesto.aprovado
        assert [resultado.modelo for resultado in manifesto.resultados] == ['hyperbolic_ball'] * 3
        diretorios = sorted(caminho.name for caminho in tmp_path.iterdir() if caminho.is_dir())
        assert diretorios == ['00_auditoria', '01_focal', '02_geodesica']

    def test_todo_experimento_aparece_uma_vez(self, tmp_path):
        """Testa manifesto com uma entrada por experimento, inclusive os com erro"""
        dados = ConfiguracaoFactory(experimentos=[
            ExperimentoFactory(nome='a', tipo='essential-range', parametros={}),
            ExperimentoFactory(nome='b'),
            ExperimentoFactory(nome='c', tipo='spherical', modelo={'tipo': 'sphere2'}, parametros={}),
        ])
        executar_configuracao(dados, saida=tmp_path, registrar=False)
        manifesto = json.loads((tmp_path / 'manifesto.json').read_text())
        assert [(item['nome'], item['veredito']) for item in manifesto['resultados']] == [
            ('a', 'error'), ('b', 'pass'), ('c', 'error'),
        ]


@pytest.mark.integration
@pytest.mark.slow
class TestSuitesAceitacao:
    """Testa as suítes nomeadas com o passo de produção"""

    @pytest.mark.parametrize('nome', [
        'plana', 'hiperbolica', 'cheeger', 'faixa_essencial', 'esferica', 'razao_lambda', 'focal',
        'convexidade', 'constantes_radiais', 'curvatura_media', 'posto_superior', 'radializacao',
    ])
    def test_suite_aprovada(self, nome, tmp_path, passo_fino):
        """Testa suíte inteira aprovada"""
        manifesto, falhas = executar_suite(nome, tmp_path)
        assert not falhas, falhas
        assert manifesto.codigo_saida() == 0

    def test_cheeger_valores(self, tmp_path, passo_fino):
        """Testa h ≈ 1 e λ₀ ≈ (1 + 1/100)²/4 em H²"""
        manifesto, _ = executar_suite('cheeger', tmp_path)
        escalares = manifesto.resultados[0].escalares
        assert escalares['h_media'] == pytest.approx(1.0, abs=1e-3)
        assert escalares['fundo_faixa_essencial'] == pytest.approx(0.25, abs=1e-3)
        assert escalares['lambda0_superior'] == pytest.approx(1.01 ** 2 / 4.0, rel=5e-2)

    def test_focal_testemunha_esfera(self, tmp_path, passo_fino):
        """Testa testemunha de S² dentro de 0,01 de π/2"""
        manifesto, _ = executar_suite('focal', tmp_path)
        esfera = manifesto.resultados[0]
        assert esfera.escalares['aprovado_bruto'] is False
        assert abs(esfera.escalares['tempo_testemunha'] - 1.5707963267948966) < 1e-2
