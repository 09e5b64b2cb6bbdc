"""
Testes da hierarquia de exceções
"""
import numpy as np
import pytest

from core.excecoes import (
    ErroConfiguracao, ErroConvergencia, ErroDominio, ErroLaboratorio, ErroPontoConjugado,
    ErroResultadoParcial,
)


@pytest.mark.unit
class TestExcecoes:
    """Testes de códigos e serialização dos erros"""

    def test_hierarquia(self):
        """Testa que todos os erros herdam de ErroLaboratorio"""
        assert issubclass(ErroDominio, ErroLaboratorio)
        assert issubclass(ErroConfiguracao, ErroLaboratorio)

    def test_como_dict_serializa_arrays(self):
        """Testa conversão de detalhes numpy em listas"""
        erro = ErroDominio('fora da bola', ponto=np.array([1.0, 2.0]))
        dados = erro.como_dict()
        assert dados['codigo'] == 'dominio'
        assert dados['detalhes']['ponto'] == [1.0, 2.0]
        assert str(erro) == 'fora da bola'

    def test_convergencia_carrega_residuo(self):
        """Testa resíduo e diferenças nos detalhes"""
        erro = ErroConvergencia('não convergiu', residuo=1e-3, diferencas=(0.1, 0.01))
        assert erro.detalhes['residuo'] == 1e-3
        assert erro.como_dict()['detalhes']['diferencas'] == [0.1, 0.01]

    def test_ponto_conjugado(self):
        """Testa o tempo do ponto conjugado"""
        erro = ErroPontoConjugado('singular', tempo=np.pi)
        assert erro.tempo == np.pi
        assert erro.codigo == 'ponto_conjugado'

    def test_resultado_parcial_ordenado(self):
        """Testa falhas indexadas e ordenadas por índice"""
        erro = ErroResultadoParcial('lote', {3: ErroDominio('a'), 1: ErroDominio('b')})
        assert list(erro.detalhes['falhas']) == ['1', '3']
        assert erro.detalhes['falhas']['1']['mensagem'] == 'b'

    def test_configuracao_sem_erros(self):
        """Testa dict vazio de erros por padrão"""
        erro = ErroConfiguracao('inválida')
        assert erro.erros == {}
        assert erro.como_dict()['codigo'] == 'configuracao'
