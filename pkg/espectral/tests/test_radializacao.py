"""
Testes da radialização e da comutação com o laplaciano
"""
import numpy as np
import pytest

from core.excecoes import ErroPrecondicao
from espectral.radializacao import funcao_suporte_compacto, radializar, residuo_comutacao
from variedades.modelos import bola_hiperbolica, euclidiano, produto, semiespaco_hiperbolico


@pytest.mark.unit
class TestRadializar:
    """Testes de R_o f"""

    def test_coordenada_linear_euclidiana(self):
        """Testa R_o x₁ = 0 no plano"""
        modelo = euclidiano(2)
        perfil = radializar(modelo, None, lambda x: x[:, 0], raio=2.0, ordem=8, passo=1e-2)
        assert np.allclose(perfil.valores, 0.0, atol=1e-12)

    def test_quadrado_da_norma(self):
        """Testa R_o |x|² = r² no plano"""
        perfil = radializar(euclidiano(2), None, lambda x: np.sum(x ** 2, axis=-1), raio=2.0, ordem=8, passo=1e-2)
        assert np.allclose(perfil.valores, perfil.r ** 2, atol=1e-10)
        assert perfil.avaliar(1.234) == pytest.approx(1.234 ** 2, abs=1e-8)

    def test_idempotente(self):
        """Testa R_o R_o f = R_o f no disco"""
        modelo = bola_hiperbolica(2)
        f = funcao_suporte_compacto(modelo, np.array([0.25, 0.0]), 1.5)
        uma = radializar(modelo, None, f, raio=2.5, ordem=32, passo=5e-3)
        duas = radializar(modelo, None, uma.como_funcao(modelo), raio=2.5, ordem=32, passo=5e-3)
        assert np.allclose(duas.valores, uma.valores, atol=1e-8)

    def test_funcao_nao_vetorizada(self):
        """Testa rejeição de f que não devolve (N,)"""
        with pytest.raises(ErroPrecondicao):
            radializar(euclidiano(2), None, lambda x: 1.0, raio=1.0, ordem=4, passo=1e-2)

    def test_avaliar_fora_do_perfil(self):
        """Testa rejeição de raio além do perfil"""
        perfil = radializar(euclidiano(2), None, lambda x: x[:, 1], raio=1.0, ordem=4, passo=1e-2)
        with pytest.raises(ErroPrecondicao):
            perfil.avaliar(1.5)


@pytest.mark.unit
class TestFuncaoSuporteCompacto:
    """Testes da função teste de suporte compacto"""

    def test_valores(self):
        """Testa valor 1 no centro e 0 fora da bola"""
        modelo = euclidiano(2)
        f = funcao_suporte_compacto(modelo, np.zeros(2), 1.0)
        assert np.allclose(f(np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 2.0]])), [1.0, 0.0, 0.0])


@pytest.mark.unit
class TestResiduoComutacao:
    """Testes de R_o Δ = Δ R_o"""

    def test_euclidiano_com_laplaciano_exato(self):
        """Testa resíduo pequeno para |x|² com Δ = 4 no plano"""
        resultado = residuo_comutacao(
            euclidiano(2), None, lambda x: np.sum(x ** 2, axis=-1), raio=2.0,
            laplaciano=lambda x: np.full(x.shape[0], 4.0), ordem=8, passo=1e-2,
        )
        assert resultado.residuo < 1e-8

    @pytest.mark.slow
    def test_disco_harmonico(self):
        """Testa comutação no disco com função de suporte compacto"""
        modelo = bola_hiperbolica(2)
        f = funcao_suporte_compacto(modelo, np.array([0.25, 0.0]), 1.5)
        resultado = residuo_comutacao(modelo, None, f, raio=2.5, ordem=64, passo=5e-3, verificacoes=6)
        assert resultado.residuo < 1e-4

    @pytest.mark.slow
    def test_controle_nao_harmonico(self):
        """Testa resíduo acima de 1e-2 em H² × R"""
        modelo = produto(semiespaco_hiperbolico(2), euclidiano(1))
        f = funcao_suporte_compacto(modelo, np.array([0.3, 1.0, 0.2]), 1.5)
        resultado = residuo_comutacao(modelo, None, f, raio=2.0, ordem=8, passo=1e-2, verificacoes=6)
        assert resultado.residuo > 1e-2

    def test_sem_raios_de_verificacao(self):
        """Testa rejeição quando o perfil é curto demais"""
        with pytest.raises(ErroPrecondicao):
            residuo_comutacao(euclidiano(2), None, lambda x: x[:, 0], raio=0.1, ordem=4, passo=1e-2)
