"""
Testes dos utilitários numéricos
"""
import numpy as np
import pytest

from core.numerica import (
    area_esfera, derivada_cinco_pontos, direcoes_baixa_discrepancia, direcoes_esfera, extrapolar_neville,
    extrapolar_richardson, gradiente_diferencas, hessiano_diferencas, norma_operador, passo_rk4,
    pesos_diadicos, quadratura_esfera, segunda_derivada_cinco_pontos, simetrizar,
    vetores_bola_baixa_discrepancia,
)


@pytest.mark.unit
class TestRungeKutta:
    """Testes do passo RK4"""

    def test_exponencial(self):
        """Testa y' = y em um passo"""
        (y,) = passo_rk4(lambda estado: (estado[0],), (np.array([1.0]),), 0.1)
        assert abs(y[0] - np.exp(0.1)) < 1e-6

    def test_passo_por_linha(self):
        """Testa passos distintos por linha do lote"""
        estado = (np.ones((2, 3)),)
        (y,) = passo_rk4(lambda e: (e[0],), estado, np.array([0.1, 0.2]))
        assert np.allclose(y[0], np.exp(0.1), atol=1e-6)
        assert np.allclose(y[1], np.exp(0.2), atol=1e-5)


@pytest.mark.unit
class TestDiferencas:
    """Testes das diferenças finitas"""

    def test_gradiente_e_hessiano_de_quadratica(self):
        """Testa derivadas de x^T A x"""
        matriz = np.array([[2.0, 0.5], [0.5, 1.0]])
        funcao = lambda x: float(x @ matriz @ x)  # noqa: E731
        x = np.array([0.3, -0.7])
        assert np.allclose(gradiente_diferencas(funcao, x, 1e-4), 2.0 * matriz @ x, atol=1e-7)
        assert np.allclose(hessiano_diferencas(funcao, x, 1e-3), 2.0 * matriz, atol=1e-6)

    def test_cinco_pontos_em_cubica(self):
        """Testa exatidão das fórmulas de cinco pontos em polinômio cúbico"""
        passo = 0.1
        x = np.arange(11) * passo
        primeira = derivada_cinco_pontos(x ** 3, passo)
        segunda = segunda_derivada_cinco_pontos(x ** 3, passo)
        assert np.isnan(primeira[:2]).all() and np.isnan(primeira[-2:]).all()
        assert np.allclose(primeira[2:-2], 3.0 * x[2:-2] ** 2, atol=1e-10)
        assert np.allclose(segunda[2:-2], 6.0 * x[2:-2], atol=1e-8)


@pytest.mark.unit
class TestExtrapolacao:
    """Testes da extrapolação em 1/t"""

    def test_richardson_remove_termo(self):
        """Testa limite exato para v = L + c/t"""
        valor = lambda t: 2.0 + 3.0 / t  # noqa: E731
        assert extrapolar_richardson(10.0, valor(10.0), 20.0, valor(20.0)) == pytest.approx(2.0, abs=1e-14)

    def test_neville_segunda_ordem(self):
        """Testa limite exato para v = L + a/t + b/t²"""
        tempos = [5.0, 10.0, 20.0]
        valores = [1.0 + 2.0 / t - 4.0 / t ** 2 for t in tempos]
        assert extrapolar_neville(tempos, valores, 2) == pytest.approx(1.0, abs=1e-12)

    def test_neville_ordem_um_igual_richardson(self):
        """Testa coincidência com Richardson para ordem 1"""
        tempos, valores = [10.0, 20.0], [3.1, 3.05]
        assert extrapolar_neville(tempos, valores, 1) == pytest.approx(
            extrapolar_richardson(10.0, 3.1, 20.0, 3.05), abs=1e-14,
        )


@pytest.mark.unit
class TestEsfera:
    """Testes de quadraturas e amostras na esfera"""

    @pytest.mark.parametrize('dim', [2, 3, 4])
    def test_pesos_somam_area(self, dim):
        """Testa soma dos pesos igual à área da esfera"""
        _, pesos = quadratura_esfera(dim, 6)
        assert pesos.sum() == pytest.approx(area_esfera(dim), rel=1e-12)

    def test_areas_conhecidas(self):
        """Testa 2π e 4π"""
        assert area_esfera(2) == pytest.approx(2.0 * np.pi)
        assert area_esfera(3) == pytest.approx(4.0 * np.pi)

    def test_segundo_momento(self):
        """Testa ∫ z² = 4π/3 e ∫ x² = 4π/3 em S²"""
        pontos, pesos = quadratura_esfera(3, 8)
        assert np.allclose(np.linalg.norm(pontos, axis=-1), 1.0)
        assert pesos @ pontos[:, 2] ** 2 == pytest.approx(4.0 * np.pi / 3.0, rel=1e-10)
        assert pesos @ pontos[:, 0] ** 2 == pytest.approx(4.0 * np.pi / 3.0, rel=1e-10)

    def test_dimensao_invalida(self):
        """Testa erro para dim < 2"""
        with pytest.raises(ValueError):
            quadratura_esfera(1, 4)

    def test_direcoes_unitarias_e_reprodutiveis(self):
        """Testa normas unitárias e mesma semente, mesmas direções"""
        primeira = direcoes_baixa_discrepancia(3, 16, semente=7)
        segunda = direcoes_baixa_discrepancia(3, 16, semente=7)
        assert np.allclose(np.linalg.norm(primeira, axis=-1), 1.0)
        assert np.array_equal(primeira, segunda)

    def test_circulo_equiespacado(self):
        """Testa direções equiespaçadas em dimensão 2"""
        direcoes = direcoes_esfera(2, 4)
        assert np.allclose(direcoes, [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-15)

    def test_vetores_na_bola(self):
        """Testa normas limitadas pelo raio"""
        vetores = vetores_bola_baixa_discrepancia(3, 32, raio=2.0)
        assert vetores.shape == (32, 3)
        assert np.all(np.linalg.norm(vetores, axis=-1) <= 2.0 + 1e-12)


@pytest.mark.unit
class TestAlgebra:
    """Testes de utilitários de álgebra linear"""

    def test_pesos_diadicos(self):
        """Testa soma 1 e razão 1/2"""
        pesos = pesos_diadicos(5)
        assert pesos.sum() == pytest.approx(1.0)
        assert np.allclose(pesos[1:] / pesos[:-1], 0.5)

    def test_simetrizar_e_norma(self):
        """Testa parte simétrica e norma espectral"""
        matriz = np.array([[3.0, 2.0], [0.0, -5.0]])
        assert np.allclose(simetrizar(matriz), [[3.0, 1.0], [1.0, -5.0]])
        assert norma_operador(np.diag([3.0, -5.0])) == pytest.approx(5.0)
