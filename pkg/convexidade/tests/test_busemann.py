"""
Testes das funções de Busemann, da função média F e das curvas integrais de ∇b_v
"""
import numpy as np
import pytest

from core.excecoes import ErroHipotese, ErroPrecondicao, ErroResultadoParcial
from core.numerica import gradiente_diferencas, hessiano_diferencas
from convexidade.busemann import (
    FOLGA_LIMITE, MedidaFronteira, bilaplaciano_F, funcao_media_F, gradiente_busemann, hessiano_busemann,
    truncamento_admissivel, valor_busemann, verificar_curva_integral,
)
from geodesicas.services import distancia
from variedades.geometria import autovalores_metricos, simbolos_christoffel
from variedades.modelos import bola_hiperbolica, esfera2, euclidiano, produto, semiespaco_hiperbolico

AGENDA_CURTA = [4.0, 8.0, 12.0]


@pytest.fixture
def disco():
    return bola_hiperbolica(2)


@pytest.mark.unit
class TestMedidaFronteira:
    """Testes das medidas de probabilidade em S_oM"""

    def test_uniforme_unitaria(self, disco):
        """Testa direções unitárias para a métrica na origem e pesos 1/K"""
        medida = MedidaFronteira.uniforme(disco, 8)
        assert np.allclose(disco.norma(disco.origem, medida.direcoes), 1.0)
        assert medida.pesos.sum() == pytest.approx(1.0, abs=1e-12)

    def test_diadica(self, disco):
        """Testa pesos decrescentes 2^{-k} renormalizados"""
        medida = MedidaFronteira.diadica(disco, 6)
        assert np.all(np.diff(medida.pesos) < 0.0)
        assert medida.pesos[0] / medida.pesos[1] == pytest.approx(2.0)

    def test_pesos_que_nao_somam_um(self):
        """Testa rejeição de pesos com soma diferente de 1"""
        with pytest.raises(ErroPrecondicao):
            MedidaFronteira(np.eye(2), np.array([0.5, 0.6]))


@pytest.mark.unit
class TestValorBusemann:
    """Testes de b_v(x)"""

    def test_euclidiano(self):
        """Testa b_v(x) = -x₁ com extrapolação em 1/t"""
        avaliacao = valor_busemann(euclidiano(2), np.array([1.0, 0.0]), np.array([0.3, 0.4]))
        assert avaliacao.valor == pytest.approx(-0.3, abs=1e-5)
        assert avaliacao.extrapolacao == 'richardson'
        assert avaliacao.monotona
        assert avaliacao.limitada

    def test_cota_pela_distancia_a_origem(self, disco):
        """Testa |b_v(x)| ≤ d(o, x) em pontos amostrados do disco"""
        v = np.array([0.5, 0.0])
        for x in ([0.2, -0.1], [-0.4, 0.3], [0.0, 0.5], [0.6, 0.0]):
            x = np.array(x)
            avaliacao = valor_busemann(disco, v, x, agenda=AGENDA_CURTA)
            assert avaliacao.limitada
            assert avaliacao.monotona
            assert abs(avaliacao.valor) <= distancia(disco, disco.origem, x) + 1e-4

    def test_sobre_o_raio(self):
        """Testa b_v(γ_v(2)) = -2"""
        avaliacao = valor_busemann(euclidiano(3), np.array([0.0, 1.0, 0.0]), np.array([0.0, 2.0, 0.0]))
        assert avaliacao.valor == pytest.approx(-2.0, abs=1e-12)
        assert avaliacao.convergiu

    def test_oraculo_do_disco(self, disco):
        """Testa o valor contra a fórmula fechada no disco de Poincaré"""
        v = np.array([0.5, 0.0])
        x = np.array([0.2, -0.1])
        avaliacao = valor_busemann(disco, v, x, agenda=AGENDA_CURTA)
        assert avaliacao.convergiu
        assert avaliacao.valor == pytest.approx(float(disco.oraculos.busemann(v, x)), abs=1e-4)
        assert avaliacao.extrapolacao == 'nenhuma'

    def test_sobre_o_raio_no_disco(self, disco):
        """Testa b_v(γ_v(2)) = -2 em H²"""
        avaliacao = valor_busemann(disco, np.array([0.5, 0.0]), np.array([np.tanh(1.0), 0.0]), agenda=AGENDA_CURTA)
        assert avaliacao.valor == pytest.approx(-2.0, abs=1e-4)

    def test_nao_convergencia_como_diagnostico(self, disco):
        """Testa última estimativa com lacuna quando a agenda é curta demais"""
        avaliacao = valor_busemann(disco, np.array([0.5, 0.0]), np.array([0.0, 0.3]), agenda=[2.0, 3.0])
        assert not avaliacao.convergiu
        assert avaliacao.lacuna_extrapolacao > 1e-5
        assert avaliacao.tempo_truncamento == 3.0

    def test_esfera_sem_hipotese(self):
        """Testa recusa em modelo com pontos conjugados"""
        with pytest.raises(ErroHipotese):
            valor_busemann(esfera2(), np.array([0.5, 0.0]), np.zeros(2))


@pytest.mark.unit
class TestTruncamentoAdmissivel:
    """Testes da monotonia e da cota de cada truncamento b_t(x)"""

    def test_sequencia_decrescente_dentro_da_cota(self):
        """Testa truncamento aceito"""
        assert truncamento_admissivel(-0.1, -0.2, 0.5) == (True, True)

    def test_primeiro_truncamento(self):
        """Testa que o primeiro valor só é checado contra a cota"""
        assert truncamento_admissivel(None, 0.4, 0.5) == (True, True)

    def test_sequencia_crescente(self):
        """Testa perda de monotonia quando b_t cresce com t"""
        monotono, limitado = truncamento_admissivel(-0.3, -0.1, 0.5)
        assert not monotono
        assert limitado

    def test_fora_da_cota(self):
        """Testa |b_t(x)| acima de d(o, x)"""
        monotono, limitado = truncamento_admissivel(-0.4, -0.5 - 10 * FOLGA_LIMITE, 0.5)
        assert monotono
        assert not limitado

    def test_distancia_desconhecida(self):
        """Testa que sem d(o, x) a cota não é avaliada"""
        assert truncamento_admissivel(None, 3.0, np.nan) == (True, True)


@pytest.mark.unit
class TestGradienteBusemann:
    """Testes de ∇b_v como menos a direção assintótica"""

    def test_euclidiano_constante(self):
        """Testa ∇b_v = -v"""
        v = np.array([0.6, 0.8])
        avaliacao = gradiente_busemann(euclidiano(2), v, np.array([-0.2, 0.1]))
        assert np.allclose(avaliacao.gradiente, -v, atol=1e-6)
        assert avaliacao.norma_gradiente == pytest.approx(1.0, abs=1e-4)

    def test_derivada_direcional(self):
        """Testa derivada -1 ao longo da direção assintótica"""
        avaliacao = gradiente_busemann(
            euclidiano(2), np.array([1.0, 0.0]), np.array([0.1, 0.2]), verificar_derivada=True,
        )
        assert avaliacao.diagnosticos['derivada_direcional'] == pytest.approx(-1.0, abs=1e-3)

    def test_sobre_o_raio_do_disco(self, disco):
        """Testa ∇b_v = -γ_v' em um ponto de γ_v"""
        v = np.array([0.0, 0.5])
        ponto = np.array([0.0, np.tanh(0.5)])
        avaliacao = gradiente_busemann(disco, v, ponto, agenda=AGENDA_CURTA)
        # γ_v'(1) = (1 - |x|²)/2 ê₂ no disco
        tangente = np.array([0.0, (1.0 - ponto[1] ** 2) / 2.0])
        assert np.allclose(avaliacao.gradiente, -tangente, atol=1e-4)

    def test_oraculo_do_disco(self, disco):
        """Testa ∇b_v contra o gradiente da fórmula fechada"""
        v = disco.normalizar(disco.origem, np.array([1.0, 1.0]))
        x = np.array([0.25, -0.15])
        avaliacao = gradiente_busemann(disco, v, x, agenda=AGENDA_CURTA)
        diferencial = gradiente_diferencas(lambda y: float(disco.oraculos.busemann(v, y)), x, 1e-6)
        esperado = np.linalg.solve(disco.metrica(x), diferencial)
        assert np.allclose(avaliacao.gradiente, esperado, atol=1e-4)
        assert avaliacao.norma_gradiente == pytest.approx(1.0, abs=1e-4)


@pytest.mark.unit
class TestHessianoBusemann:
    """Testes de Hess b_v = -D'_u(0) no complemento da direção assintótica"""

    def test_euclidiano_nulo(self):
        """Testa hessiano nulo no plano"""
        avaliacao = hessiano_busemann(euclidiano(2), np.array([1.0, 0.0]), np.array([0.2, 0.3]))
        assert np.allclose(avaliacao.hessiano, 0.0, atol=1e-8)

    def test_h2_identidade_no_complemento(self, disco):
        """Testa autovalores {0, 1}, aniquilamento do gradiente e semidefinição"""
        avaliacao = hessiano_busemann(
            disco, np.array([0.5, 0.0]), np.array([0.2, -0.1]), agenda=AGENDA_CURTA, agenda_estavel=AGENDA_CURTA,
        )
        autovalores = autovalores_metricos(avaliacao.hessiano, avaliacao.metrica)
        assert autovalores == pytest.approx([0.0, 1.0], abs=1e-4)
        assert avaliacao.diagnosticos['aniquilamento'] < 1e-4
        assert avaliacao.diagnosticos['semidefinida']

    def test_identidade_de_projecao(self, disco):
        """Testa Hess(x, x) = Hess(x⊥, x⊥) para x aleatório"""
        avaliacao = hessiano_busemann(
            disco, np.array([0.0, 0.5]), np.array([-0.1, 0.2]), agenda=AGENDA_CURTA, agenda_estavel=AGENDA_CURTA,
        )
        g, gradiente, hessiano = avaliacao.metrica, avaliacao.gradiente, avaliacao.hessiano
        for x in np.random.default_rng(3).normal(size=(5, 2)):
            perpendicular = x - (gradiente @ g @ x) * gradiente
            assert x @ hessiano @ x == pytest.approx(perpendicular @ hessiano @ perpendicular, abs=1e-6)

    def test_diferencas_finitas_do_oraculo(self, disco):
        """Testa o hessiano contra diferenças covariantes da fórmula fechada"""
        v = np.array([0.5, 0.0])
        x = np.array([0.1, 0.25])
        avaliacao = hessiano_busemann(disco, v, x, agenda=AGENDA_CURTA, agenda_estavel=AGENDA_CURTA)

        def b(y):
            return float(disco.oraculos.busemann(v, y))

        gradiente = gradiente_diferencas(b, x, 1e-4)
        esperado = hessiano_diferencas(b, x, 1e-4) - np.einsum('kij,k->ij', simbolos_christoffel(disco, x), gradiente)
        assert np.allclose(avaliacao.hessiano, esperado, atol=1e-3)

    def test_produto_h2_r(self):
        """Testa bloco positivo de posto 1 no fator H² e zero na direção de R"""
        modelo = produto(semiespaco_hiperbolico(2), euclidiano(1))
        v = np.array([1.0, 0.0, 0.0])
        avaliacao = hessiano_busemann(modelo, v, np.array([0.2, 1.1, 0.4]))
        autovalores = autovalores_metricos(avaliacao.hessiano, avaliacao.metrica)
        assert autovalores == pytest.approx([0.0, 0.0, 1.0], abs=1e-4)
        assert np.allclose(avaliacao.hessiano[2], 0.0, atol=1e-6)
        assert avaliacao.valor == pytest.approx(float(modelo.oraculos.busemann(v, avaliacao.ponto)), abs=1e-4)


@pytest.mark.unit
class TestFuncaoMediaF:
    """Testes de F = Σ w_k b_{v_k}"""

    def test_euclidiano_antipodal(self):
        """Testa gradiente e hessiano nulos com direções antipodalmente simétricas"""
        modelo = euclidiano(2)
        valor = funcao_media_F(modelo, MedidaFronteira.uniforme(modelo, 8), np.array([0.2, 0.1]))
        assert np.allclose(valor.gradiente, 0.0, atol=1e-6)
        assert np.allclose(valor.hessiano, 0.0, atol=1e-8)
        assert valor.valor == pytest.approx(0.0, abs=1e-5)

    def test_h2_na_origem(self, disco):
        """Testa Hess F(o) = Id/2 (relativo à métrica) e ΔF = 1"""
        valor = funcao_media_F(
            disco, MedidaFronteira.uniforme(disco, 16), disco.origem,
            agenda=AGENDA_CURTA, agenda_estavel=AGENDA_CURTA,
        )
        assert autovalores_metricos(valor.hessiano, valor.metrica) == pytest.approx([0.5, 0.5], abs=1e-4)
        assert valor.laplaciano == pytest.approx(1.0, abs=1e-3)
        assert valor.norma_gradiente < 1e-6

    def test_laplaciano_constante(self, disco):
        """Testa ΔF = n - 1 fora da origem"""
        valor = funcao_media_F(
            disco, MedidaFronteira.uniforme(disco, 8), np.array([0.3, -0.2]),
            agenda=AGENDA_CURTA, agenda_estavel=AGENDA_CURTA, threads=2,
        )
        assert valor.laplaciano == pytest.approx(1.0, abs=1e-3)
        assert valor.norma_gradiente <= 1.0 + 1e-6
        assert valor.autovalor_minimo > 0.0

    def test_threads_nao_alteram_resultado(self, disco):
        """Testa resultado idêntico com 1 e 3 threads"""
        medida = MedidaFronteira.uniforme(disco, 12)
        argumentos = dict(agenda=AGENDA_CURTA, agenda_estavel=AGENDA_CURTA)
        um = funcao_media_F(disco, medida, np.array([0.1, 0.1]), threads=1, **argumentos)
        tres = funcao_media_F(disco, medida, np.array([0.1, 0.1]), threads=3, **argumentos)
        assert np.array_equal(um.hessiano, tres.hessiano)
        assert um.valor == tres.valor

    def test_resultado_parcial(self, disco):
        """Testa ErroResultadoParcial listando as direções sem convergência"""
        with pytest.raises(ErroResultadoParcial) as excinfo:
            funcao_media_F(
                disco, MedidaFronteira.uniforme(disco, 4), np.array([0.1, 0.0]),
                agenda=[4.0, 5.0], tolerancia=1e-14,
            )
        assert sorted(excinfo.value.falhas) == [0, 1, 2, 3]

    def test_bilaplaciano_euclidiano(self):
        """Testa Δ²F = 0 no plano"""
        modelo = euclidiano(2)
        assert bilaplaciano_F(modelo, MedidaFronteira.uniforme(modelo, 4), np.array([0.1, 0.2])) == pytest.approx(
            0.0, abs=1e-6,
        )


@pytest.mark.unit
class TestCurvaIntegral:
    """Testes das curvas integrais de ∇b_v"""

    def test_sobre_o_raio_euclidiano(self):
        """Testa que o fluxo a partir de γ_v percorre γ_v ao contrário"""
        resultado = verificar_curva_integral(euclidiano(2), np.array([1.0, 0.0]), np.array([0.5, 0.0]), T=5.0)
        assert resultado.desvio_maximo < 1e-6
        assert resultado.aprovado
        assert np.allclose(resultado.fluxo[-1], [-4.5, 0.0], atol=1e-6)

    @pytest.mark.slow
    def test_h2_semiespaco(self):
        """Testa desvio < 1e-3 entre o fluxo e a geodésica em H²"""
        modelo = semiespaco_hiperbolico(2)
        resultado = verificar_curva_integral(
            modelo, np.array([0.0, 1.0]), np.array([0.5, 1.0]), T=5.0, agenda=[10.0, 15.0, 20.0, 25.0],
        )
        assert resultado.desvio_maximo < 1e-3
