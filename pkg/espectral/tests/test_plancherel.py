"""
Testes das funções esféricas, da densidade |c(λ)|⁻² e da faixa essencial
"""
import csv

import numpy as np
import pytest

from core.excecoes import ErroModeloNaoSuportado, ErroPrecondicao
from espectral.plancherel import (
    densidade_funcao_c, faixa_essencial, funcao_esferica, testemunha_exclusao, verificar_relacao_autovalor,
)
from variedades.modelos import bola_hiperbolica, euclidiano, produto, semiespaco_hiperbolico


@pytest.mark.unit
class TestFuncaoEsferica:
    """Testes de φ_λ pela EDO radial"""

    def test_h3_forma_fechada(self):
        """Testa φ_λ(r) = sin(λr)/(λ sinh r) em H³"""
        perfil = funcao_esferica(bola_hiperbolica(3), 1.5, r_max=10.0)
        r = perfil.r[1:]
        assert np.allclose(perfil.valores[1:], np.sin(1.5 * r) / (1.5 * np.sinh(r)), atol=1e-6)
        assert perfil.valores[0] == 1.0
        assert perfil.autovalor == pytest.approx(1.5 ** 2 + 1.0)
        assert perfil.residuo < 1e-6

    def test_euclidiana(self):
        """Testa φ_λ(r) = sin(λr)/(λr) em R³ (h = 0)"""
        perfil = funcao_esferica(euclidiano(3), 2.0, r_max=8.0, pontos=401)
        r = perfil.r[1:]
        assert np.allclose(perfil.valores[1:], np.sin(2.0 * r) / (2.0 * r), atol=1e-6)

    def test_avaliar(self):
        """Testa avaliação fora dos nós e perto de r = 0"""
        perfil = funcao_esferica(semiespaco_hiperbolico(3), 1.0, r_max=5.0)
        assert perfil.avaliar(2.345) == pytest.approx(np.sin(2.345) / np.sinh(2.345), abs=1e-8)
        assert perfil.avaliar(1e-4) == pytest.approx(1.0, abs=1e-8)
        with pytest.raises(ErroPrecondicao):
            perfil.avaliar(6.0)

    def test_relacao_autovalor_no_disco(self):
        """Testa -Δ(φ∘d)/(φ∘d) = λ² + 1/4 em H²"""
        modelo = bola_hiperbolica(2)
        perfil = funcao_esferica(modelo, 0.5, r_max=3.0)
        quocientes = verificar_relacao_autovalor(modelo, perfil, np.array([[0.2, 0.1], [-0.3, 0.25]]))
        assert np.allclose(quocientes, 0.5, atol=1e-4)

    def test_modelo_nao_harmonico(self):
        """Testa rejeição de H² × R"""
        with pytest.raises(ErroModeloNaoSuportado):
            funcao_esferica(produto(semiespaco_hiperbolico(2), euclidiano(1)), 1.0)

    def test_frequencia_negativa(self):
        """Testa rejeição de λ < 0"""
        with pytest.raises(ErroPrecondicao):
            funcao_esferica(bola_hiperbolica(2), -1.0)

    def test_exportar_csv(self, tmp_path):
        """Testa colunas r, φ, φ'"""
        perfil = funcao_esferica(bola_hiperbolica(2), 1.0, r_max=2.0, pontos=11)
        with open(perfil.exportar_csv(tmp_path / 'phi.csv'), newline='') as arquivo:
            linhas = list(csv.reader(arquivo))
        assert linhas[0] == ['r', 'phi', 'dphi']
        assert len(linhas) == 12


@pytest.mark.unit
class TestDensidadeFuncaoC:
    """Testes de |c(λ)|⁻² e das constantes C, K"""

    def test_h3_proporcional_a_lambda2(self):
        """Testa |c(λ)|⁻² = 4λ² em H³ e C = 1/2 com K arbitrário"""
        lambdas = np.linspace(0.0, 10.0, 101)
        densidade = densidade_funcao_c(3, lambdas)
        assert np.allclose(densidade.densidade, 4.0 * lambdas ** 2, rtol=1e-10)
        assert densidade.razao_quadratica == pytest.approx((4.0, 4.0), rel=1e-10)
        assert densidade.constante_C == pytest.approx(0.5, rel=1e-10)
        assert densidade.limites_verificados()

    def test_h2_forma_fechada(self):
        """Testa |c(λ)|⁻² = πλ tanh(πλ) em H²"""
        lambdas = np.linspace(0.0, 5.0, 51)
        densidade = densidade_funcao_c(2, lambdas)
        assert np.allclose(densidade.densidade, np.pi * lambdas * np.tanh(np.pi * lambdas), rtol=1e-10)
        assert densidade.densidade[0] == 0.0
        assert 0.0 < densidade.constante_K <= 5.0
        assert densidade.limites_verificados()

    def test_dimensao_invalida(self):
        """Testa rejeição de n < 2"""
        with pytest.raises(ErroPrecondicao):
            densidade_funcao_c(1, [0.5, 1.0])

    def test_grade_negativa(self):
        """Testa rejeição de λ negativo"""
        with pytest.raises(ErroPrecondicao):
            densidade_funcao_c(3, [-1.0, 1.0])


@pytest.mark.unit
class TestFaixaEssencial:
    """Testes da faixa essencial de m(λ) = λ² + h²/4"""

    @pytest.fixture
    def densidade_h2(self):
        return densidade_funcao_c(2, np.linspace(0.0, 20.0, 201))

    def test_fundo_e_concordancia(self, densidade_h2):
        """Testa exclusão abaixo de h²/4, inclusão acima e concordância com a varredura"""
        resultado = faixa_essencial(1.0, densidade_h2, [0.15, 0.25, 0.5, 1.0], [0.05, 0.1])
        vereditos = {(v.x, v.epsilon): v for v in resultado.vereditos}
        assert resultado.fundo == pytest.approx(0.25)
        assert not vereditos[(0.15, 0.05)].incluido
        assert not vereditos[(0.15, 0.1)].incluido
        assert vereditos[(0.25, 0.05)].incluido
        assert vereditos[(1.0, 0.05)].intervalo == pytest.approx((np.sqrt(0.7), np.sqrt(0.8)))
        assert resultado.concordancia
        assert resultado.fundo_correto

    def test_testemunha(self):
        """Testa ε = h²/4 - x"""
        assert testemunha_exclusao(0.25, 0.15) == pytest.approx(0.1)

    def test_intervalo_menor_que_celula(self, densidade_h2):
        """Testa pré-imagem mais estreita que uma célula da grade"""
        resultado = faixa_essencial(1.0, densidade_h2, [100.0], [1e-6])
        veredito = resultado.vereditos[0]
        assert veredito.incluido
        assert veredito.incluido_forca_bruta
        assert veredito.concorda

    def test_epsilon_invalido(self, densidade_h2):
        """Testa rejeição de ε ≤ 0"""
        with pytest.raises(ErroPrecondicao):
            faixa_essencial(1.0, densidade_h2, [1.0], [0.0])

    def test_exportar_csv(self, densidade_h2, tmp_path):
        """Testa uma linha por par (x, ε)"""
        resultado = faixa_essencial(1.0, densidade_h2, [0.1, 1.0], [0.1])
        with open(resultado.exportar_csv(tmp_path / 'faixa.csv'), newline='') as arquivo:
            linhas = list(csv.reader(arquivo))
        assert linhas[0][:3] == ['x', 'epsilon', 'incluido']
        assert len(linhas) == 3
