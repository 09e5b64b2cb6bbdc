"""
Testes da escrita determinística de relatórios e do acesso a parâmetros
"""
import math

import numpy as np
import pytest

from core.configuracao import PADROES, parametro
from core.relatorios import dumps_json, escrever_csv, escrever_json, formatar_float, hash_configuracao


@pytest.mark.unit
class TestFormatacao:
    """Testes da formatação fixa de floats"""

    def test_dezessete_digitos(self):
        """Testa que 17 algarismos reproduzem o float exatamente"""
        texto = formatar_float(0.1, 17)
        assert texto == '0.10000000000000001'
        assert float(texto) == 0.1

    def test_valores_especiais(self):
        """Testa nan e infinitos"""
        assert formatar_float(math.nan) == 'nan'
        assert formatar_float(math.inf) == 'inf'
        assert formatar_float(-math.inf) == '-inf'

    def test_digitos_zero_explicito(self):
        """Testa que digitos=0 não cai no padrão da configuração"""
        assert formatar_float(0.123, 0) == '0.1'
        assert formatar_float(0.123, 3) == '0.123'

    def test_inteiro_em_float(self):
        """Testa que 1.0 vira '1'"""
        assert formatar_float(1.0) == '1'


@pytest.mark.unit
class TestJsonDeterministico:
    """Testes do JSON com chaves ordenadas e floats fixos"""

    def test_texto_exato(self):
        """Testa bytes emitidos para uma estrutura pequena"""
        texto = dumps_json({'b': 1.0, 'a': [np.float64(0.5)]})
        assert texto == '{\n  "a": [\n    0.5\n  ],\n  "b": 1\n}\n'

    def test_ordem_das_chaves_nao_importa(self):
        """Testa mesma saída para dicts com ordens de inserção diferentes"""
        assert dumps_json({'x': 1, 'y': [1, 2]}) == dumps_json({'y': [1, 2], 'x': 1})

    def test_nan_vira_texto(self):
        """Testa que nan é emitido como string JSON"""
        assert '"nan"' in dumps_json({'valor': float('nan')})

    def test_tipos_numpy(self):
        """Testa conversão de arrays, inteiros e booleanos numpy"""
        texto = dumps_json({'v': np.array([1.5, 2.0]), 'n': np.int64(3), 'ok': np.bool_(True)})
        assert '"n": 3' in texto
        assert '"ok": true' in texto
        assert '1.5' in texto

    def test_vazios(self):
        """Testa dicts e listas vazios"""
        assert dumps_json({'a': {}, 'b': []}) == '{\n  "a": {},\n  "b": []\n}\n'

    def test_escrever_json_cria_diretorio(self, tmp_path):
        """Testa criação de diretórios intermediários"""
        caminho = escrever_json(tmp_path / 'sub' / 'dados.json', {'a': 1})
        assert caminho.read_text(encoding='utf-8') == dumps_json({'a': 1})


@pytest.mark.unit
class TestCsv:
    """Testes do CSV com células formatadas"""

    def test_celulas(self, tmp_path):
        """Testa booleanos, inteiros, floats e texto"""
        caminho = escrever_csv(tmp_path / 'tabela.csv', ['a', 'b', 'c', 'd'], [[True, 3, 0.25, 'x']])
        linhas = caminho.read_text(encoding='utf-8').splitlines()
        assert linhas == ['a,b,c,d', 'true,3,0.25,x']

    def test_mesmos_bytes(self, tmp_path):
        """Testa que duas escritas iguais geram arquivos idênticos"""
        linhas = [[i, np.sqrt(i)] for i in range(5)]
        primeiro = escrever_csv(tmp_path / 'a.csv', ['i', 'raiz'], linhas)
        segundo = escrever_csv(tmp_path / 'b.csv', ['i', 'raiz'], linhas)
        assert primeiro.read_bytes() == segundo.read_bytes()


@pytest.mark.unit
class TestHashConfiguracao:
    """Testes do hash canônico da configuração"""

    def test_independe_da_ordem(self):
        """Testa hash igual para chaves em ordens diferentes"""
        assert hash_configuracao({'a': 1, 'b': [1, 2]}) == hash_configuracao({'b': [1, 2], 'a': 1})

    def test_muda_com_valor(self):
        """Testa hash diferente para valores diferentes"""
        assert hash_configuracao({'a': 1}) != hash_configuracao({'a': 2})
        assert len(hash_configuracao({})) == 64


@pytest.mark.unit
class TestParametro:
    """Testes do acesso aos parâmetros do laboratório"""

    def test_valor_das_settings(self):
        """Testa leitura do dict LABORATORIO das settings de teste"""
        assert parametro('PASSO_INTEGRACAO') == 1e-2

    def test_padrao(self):
        """Testa que parâmetros conhecidos sempre têm valor"""
        for nome in PADROES:
            assert parametro(nome) is not None

    def test_desconhecido(self):
        """Testa erro para parâmetro inexistente"""
        with pytest.raises(KeyError):
            parametro('NAO_EXISTE')
