"""
Testes do perfil radial, da curvatura média de horosferas, das razões de
Cheeger e do quociente de Rayleigh
"""
import csv

import numpy as np
import pytest

from core.excecoes import ErroPrecondicao
from espectral.services import (
    amostrar_curvatura_media, curvatura_media_horosfera, perfil_radial, quociente_rayleigh_lambda0,
    relatorio_espectral, varrer_razao_cheeger,
)
from variedades.modelos import bola_hiperbolica, esfera2, euclidiano, produto, semiespaco_hiperbolico

AGENDA_CURTA = [4.0, 8.0, 12.0]


@pytest.mark.unit
class TestPerfilRadial:
    """Testes da redução radial por tensores de Jacobi"""

    def test_area_euclidiana(self):
        """Testa |∂B_r| = 2πr e |B_r| = πr² no plano"""
        perfil = perfil_radial(euclidiano(2), raio=3.0, passo=1e-2, ordem=4)
        assert np.allclose(perfil.area, 2.0 * np.pi * perfil.r, atol=1e-10)
        assert perfil.volume[-1] == pytest.approx(9.0 * np.pi, rel=1e-10)

    def test_area_hiperbolica(self):
        """Testa |∂B_r| = 2π sinh r no disco"""
        perfil = perfil_radial(bola_hiperbolica(2), raio=4.0, passo=1e-2, ordem=4)
        assert np.allclose(perfil.area[1:] / (2.0 * np.pi * np.sinh(perfil.r[1:])), 1.0, atol=1e-6)

    def test_curvatura_media_das_esferas(self):
        """Testa Δd = coth r em H²"""
        perfil = perfil_radial(semiespaco_hiperbolico(2), raio=3.0, passo=1e-2, ordem=4)
        assert np.isnan(perfil.curvaturas[0, 0])
        assert np.allclose(perfil.curvatura_media_esferas[10:], 1.0 / np.tanh(perfil.r[10:]), atol=1e-6)

    def test_dimensao_um(self):
        """Testa rejeição da redução radial em dimensão 1"""
        with pytest.raises(ErroPrecondicao):
            perfil_radial(euclidiano(1), raio=1.0)


@pytest.mark.unit
class TestCurvaturaMediaHorosfera:
    """Testes de h = Δb_v pelas duas rotas"""

    def test_h3_igual_a_dois(self):
        """Testa h = n - 1 em H³ na bola com agenda curta"""
        modelo = bola_hiperbolica(3)
        resultado = curvatura_media_horosfera(
            modelo, np.array([0.5, 0.0, 0.0]), modelo.origem, agenda=AGENDA_CURTA, agenda_estavel=AGENDA_CURTA,
        )
        assert resultado.h == pytest.approx(2.0, abs=1e-4)
        assert resultado.h_tensor == pytest.approx(2.0, abs=1e-4)
        assert resultado.desvio_rotas < 1e-4

    def test_euclidiano_nulo(self):
        """Testa horosferas planas (hiperplanos) no espaço euclidiano"""
        modelo = euclidiano(2)
        resultado = curvatura_media_horosfera(modelo, np.array([0.6, 0.8]), np.array([0.3, -0.2]))
        assert abs(resultado.h) < 1e-6
        assert abs(resultado.h_tensor) < 1e-6

    def test_produto_por_fator(self):
        """Testa h = 1 na direção de H² e h = 0 na direção de R em H² × R"""
        modelo = produto(semiespaco_hiperbolico(2), euclidiano(1))
        hiperbolica = curvatura_media_horosfera(modelo, np.array([1.0, 0.0, 0.0]), modelo.origem)
        plana = curvatura_media_horosfera(modelo, np.array([0.0, 0.0, 1.0]), modelo.origem)
        assert hiperbolica.h == pytest.approx(1.0, abs=1e-3)
        assert abs(plana.h) < 1e-3

    def test_amostras_harmonicas(self):
        """Testa dispersão pequena de h no disco"""
        amostras = amostrar_curvatura_media(
            bola_hiperbolica(2), direcoes=4, quantidade_pontos=2, raio_pontos=0.5,
            agenda=AGENDA_CURTA, agenda_estavel=AGENDA_CURTA,
        )
        assert len(amostras.amostras) == 8
        assert amostras.media == pytest.approx(1.0, abs=1e-3)
        assert amostras.assintoticamente_harmonica
        assert amostras.como_dict()['falhas'] == {}

    @pytest.mark.slow
    def test_produto_nao_harmonico(self):
        """Testa dispersão de h acima de 0.5 em H² × R"""
        modelo = produto(semiespaco_hiperbolico(2), euclidiano(1))
        amostras = amostrar_curvatura_media(modelo, direcoes=8, quantidade_pontos=1, raio_pontos=0.5)
        assert amostras.dispersao > 0.5
        assert not amostras.assintoticamente_harmonica


@pytest.mark.unit
class TestRazaoCheeger:
    """Testes de |∂B_r| / |B_r|"""

    def test_euclidiana(self):
        """Testa razão n/r em R³"""
        varredura = varrer_razao_cheeger(euclidiano(3), raios=(1.0, 2.0, 4.0), passo=1e-2, ordem=4)
        assert np.allclose(varredura.razoes, 3.0 / varredura.raios, rtol=1e-8)
        assert varredura.decrescente
        assert varredura.desvio_oraculo < 1e-10

    def test_h2_tende_a_um(self):
        """Testa razão coth(r/2) → 1 = h no semiespaço até r = 15"""
        varredura = varrer_razao_cheeger(
            semiespaco_hiperbolico(2), raios=(1.0, 2.0, 4.0, 8.0, 15.0), passo=1e-2, ordem=4,
        )
        assert varredura.razoes[-1] == pytest.approx(1.0, rel=2e-2)
        assert np.allclose(varredura.razoes, 1.0 / np.tanh(varredura.raios / 2.0), rtol=1e-5)
        assert varredura.limite_stokes
        assert varredura.decrescente

    def test_h3_tende_a_dois(self):
        """Testa razão → 2 em H³"""
        varredura = varrer_razao_cheeger(semiespaco_hiperbolico(3), raios=(2.0, 5.0, 10.0), passo=1e-2, ordem=3)
        assert varredura.razoes[-1] == pytest.approx(2.0, abs=1e-3)
        assert np.all(varredura.razoes >= 2.0 - 1e-3)

    def test_sem_h_declarado(self):
        """Testa limite de Stokes indefinido sem h"""
        varredura = varrer_razao_cheeger(esfera2(), raios=(0.5, 1.0), passo=1e-2, ordem=4)
        assert varredura.limite_stokes is None

    def test_raios_invalidos(self):
        """Testa rejeição de raio não positivo"""
        with pytest.raises(ErroPrecondicao):
            varrer_razao_cheeger(euclidiano(2), raios=(0.0, 1.0))

    def test_exportar_csv(self, tmp_path):
        """Testa pares (r, razão) no CSV"""
        varredura = varrer_razao_cheeger(euclidiano(2), raios=(1.0, 2.0), passo=1e-2, ordem=4)
        with open(varredura.exportar_csv(tmp_path / 'cheeger.csv'), newline='') as arquivo:
            linhas = list(csv.reader(arquivo))
        assert linhas[0] == ['r', 'razao']
        assert float(linhas[2][1]) == pytest.approx(1.0, rel=1e-8)


@pytest.mark.unit
class TestQuocienteRayleigh:
    """Testes do limite superior de λ₀"""

    def test_h2_indice_cem(self):
        """Testa quociente a² com a = (1 + 1/100)/2 em H²"""
        resultado = quociente_rayleigh_lambda0(semiespaco_hiperbolico(2), n_indice=100, raio=12.0, passo=1e-2, ordem=4)
        assert resultado.valor == pytest.approx(0.505 ** 2, rel=1e-4)
        assert resultado.acima_do_limite
        assert resultado.desvio_gradiente < 1e-4
        assert resultado.crescimento == pytest.approx(1.0, abs=1e-2)

    def test_euclidiano(self):
        """Testa quociente 1/(4n²) no plano"""
        resultado = quociente_rayleigh_lambda0(euclidiano(2), n_indice=10, raio=12.0, passo=1e-2, ordem=4)
        assert resultado.valor == pytest.approx(1.0 / 400.0, rel=1e-3)

    def test_sem_h(self):
        """Testa exigência de h em modelos sem h declarado"""
        with pytest.raises(ErroPrecondicao):
            quociente_rayleigh_lambda0(esfera2())

    def test_indice_invalido(self):
        """Testa rejeição de n < 1"""
        with pytest.raises(ErroPrecondicao):
            quociente_rayleigh_lambda0(euclidiano(2), n_indice=0)


@pytest.mark.unit
class TestRelatorioEspectral:
    """Testes do relatório que reúne h, Cheeger e λ₀"""

    def test_disco_aprovado(self):
        """Testa a cadeia h²/4 ≤ λ₀ ≤ quociente no disco"""
        relatorio = relatorio_espectral(
            bola_hiperbolica(2), direcoes=4, quantidade_pontos=2, raio_pontos=0.5, raios=(1.0, 2.0, 4.0),
            raio=8.0, agenda=AGENDA_CURTA, agenda_estavel=AGENDA_CURTA, passo=1e-2, ordem=4,
        )
        dados = relatorio.como_dict()
        assert relatorio.aprovado
        assert dados['fundo_faixa_essencial'] == pytest.approx(0.25, abs=1e-3)
        assert dados['residuos']['h_declarado'] < 1e-3
        assert dados['residuos']['cadeia'] >= 0.0
