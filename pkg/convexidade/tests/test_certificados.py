"""
Testes dos certificados de convexidade estrita
"""
import csv

import numpy as np
import pytest

from core.excecoes import ErroDominio, ErroPrecondicao
from convexidade.busemann import MedidaFronteira
from convexidade.certificados import amostrar_pontos_bola, certificar_convexidade_estrita
from variedades.modelos import bola_hiperbolica, euclidiano

AGENDA_CURTA = [4.0, 8.0, 12.0]


@pytest.mark.unit
class TestAmostrarPontosBola:
    """Testes da amostragem na bola métrica"""

    def test_pontos_dentro_da_bola(self):
        """Testa d(o, x) ≤ raio pelo oráculo do disco"""
        modelo = bola_hiperbolica(2)
        pontos = amostrar_pontos_bola(modelo, 3.0, 20)
        distancias = modelo.oraculos.distancia(np.zeros(2), pontos)
        assert pontos.shape == (20, 2)
        assert np.all(distancias <= 3.0 + 1e-6)

    def test_deterministica(self):
        """Testa mesma semente, mesmos pontos"""
        modelo = euclidiano(3)
        assert np.array_equal(amostrar_pontos_bola(modelo, 1.0, 5, semente=7), amostrar_pontos_bola(modelo, 1.0, 5, semente=7))

    def test_centro_fora_da_carta(self):
        """Testa erro de domínio com centro fora do disco"""
        with pytest.raises(ErroDominio):
            amostrar_pontos_bola(bola_hiperbolica(2), 1.0, 5, centro=np.array([1.5, 0.0]))


@pytest.mark.unit
class TestCertificarConvexidade:
    """Testes do certificado por amostragem"""

    def test_exaustao_h2_estrita(self):
        """Testa f = sqrt(1 + r²) estritamente convexa em r ≤ 5 com margem 1e-3"""
        modelo = bola_hiperbolica(2)
        pontos = amostrar_pontos_bola(modelo, 5.0, 30)
        certificado = certificar_convexidade_estrita(modelo, 'exhaustion_f', pontos, margem=1e-3)
        assert certificado.estrito
        assert certificado.autovalor_minimo >= 26.0 ** -1.5 - 1e-6
        assert certificado.limite_gradiente <= 1.0
        assert certificado.pior_ponto is not None

    def test_distancia_quadrado_euclidiana(self):
        """Testa autovalor mínimo 1 para u = r²/2 no plano"""
        modelo = euclidiano(2)
        pontos = amostrar_pontos_bola(modelo, 2.0, 6)
        certificado = certificar_convexidade_estrita(modelo, 'distance_sq', pontos, margem=0.5)
        assert certificado.estrito
        assert certificado.autovalor_minimo == pytest.approx(1.0, abs=1e-10)

    def test_media_euclidiana_nao_estrita(self):
        """Testa F não estritamente convexa no plano (autovalor mínimo ≈ 0)"""
        modelo = euclidiano(2)
        certificado = certificar_convexidade_estrita(
            modelo, 'averaged_F', np.array([[0.1, 0.2], [-0.3, 0.1]]), margem=1e-3,
            medida=MedidaFronteira.uniforme(modelo, 8),
        )
        assert not certificado.estrito
        assert abs(certificado.autovalor_minimo) < 1e-8

    def test_media_h2_estrita_com_medidas(self):
        """Testa F estritamente convexa em H² com margem 0.1 e comparação de medidas"""
        modelo = bola_hiperbolica(2)
        pontos = np.array([[0.0, 0.0], [0.2, 0.1], [-0.1, -0.25]])
        certificado = certificar_convexidade_estrita(
            modelo, 'averaged_F', pontos, margem=0.1, medida=MedidaFronteira.uniforme(modelo, 16),
            comparar_medidas=True, agenda=AGENDA_CURTA, agenda_estavel=AGENDA_CURTA,
        )
        assert certificado.estrito
        assert certificado.comparacao_medidas['uniforme']['estrito']
        assert certificado.comparacao_medidas['diadica']['autovalor_minimo'] > 0.0

    def test_falhas_registradas(self):
        """Testa certificado não estrito quando uma amostra falha"""
        modelo = euclidiano(2)
        certificado = certificar_convexidade_estrita(modelo, 'exhaustion_f', np.array([[1.0, 0.0], [np.nan, 0.0]]))
        assert list(certificado.falhas) == [1]
        assert not certificado.estrito
        assert certificado.como_dict()['falhas'][1]['codigo'] == 'dominio'

    def test_funcao_desconhecida(self):
        """Testa rejeição de identificador de função"""
        with pytest.raises(ErroPrecondicao):
            certificar_convexidade_estrita(euclidiano(2), 'busemann', np.zeros((1, 2)))

    def test_media_exige_medida(self):
        """Testa rejeição de averaged_F sem medida"""
        with pytest.raises(ErroPrecondicao):
            certificar_convexidade_estrita(euclidiano(2), 'averaged_F', np.zeros((1, 2)))

    def test_exportar_csv(self, tmp_path):
        """Testa uma linha por amostra com autovalor e norma do gradiente"""
        modelo = euclidiano(2)
        certificado = certificar_convexidade_estrita(modelo, 'exhaustion_f', np.array([[1.0, 0.0], [0.0, 2.0]]))
        caminho = certificado.exportar_csv(tmp_path / 'certificado.csv')
        with open(caminho, newline='') as arquivo:
            linhas = list(csv.reader(arquivo))
        assert linhas[0] == ['x0', 'x1', 'autovalor_minimo', 'norma_gradiente']
        assert len(linhas) == 3

    @pytest.mark.slow
    def test_exaustao_h2_cem_pontos(self):
        """Testa o certificado com 100 amostras em r ≤ 5"""
        modelo = bola_hiperbolica(2)
        certificado = certificar_convexidade_estrita(
            modelo, 'exhaustion_f', amostrar_pontos_bola(modelo, 5.0, 100), margem=1e-3, threads=2,
        )
        assert certificado.estrito
