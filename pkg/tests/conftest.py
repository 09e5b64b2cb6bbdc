"""
Configurações e fixtures para pytest
"""
import os

import django
import pytest

# Configurar Django ANTES de importar qualquer coisa do projeto
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'laboratorio_geometrico.settings.test')
django.setup()

from tests.factories import ConfiguracaoFactory, ExperimentoFactory  # noqa: E402


@pytest.fixture
def diretorio_saida(tmp_path):
    """Diretório de saída isolado por teste"""
    return tmp_path / 'saida'


@pytest.fixture
def configuracao_minima():
    """Configuração com uma varredura focal curta no plano"""
    return ConfiguracaoFactory(nome='minima')


@pytest.fixture
def configuracao_com_erro():
    """Configuração cujo primeiro experimento falha numericamente e o segundo passa"""
    return ConfiguracaoFactory(
        nome='com_erro',
        experimentos=[
            ExperimentoFactory(
                nome='faixa_no_plano', tipo='essential-range', parametros={},
            ),
            ExperimentoFactory(nome='focal_plano'),
        ],
    )


@pytest.fixture
def arquivo_configuracao(tmp_path):
    """Grava um dict como arquivo JSON de configuração e devolve o caminho"""
    import json

    def gravar(dados, nome='config.json'):
        caminho = tmp_path / nome
        caminho.write_text(json.dumps(dados), encoding='utf-8')
        return caminho

    return gravar
