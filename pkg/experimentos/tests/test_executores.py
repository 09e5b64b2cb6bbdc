"""
Testes dos executores por tipo de experimento
"""
import math

import numpy as np
import pytest

from core.excecoes import ErroModeloNaoSuportado, ErroPrecondicao
from experimentos.executores import EXECUTORES, ContextoExperimento
from experimentos.serializers import PARAMETROS_POR_TIPO, TIPOS_EXPERIMENTO
from variedades.registro import construir_modelo


def executar(tipo, modelo, contexto, **parametros):
    """Valida os parâmetros como a configuração faria e chama o executor"""
    serializer = PARAMETROS_POR_TIPO[tipo](data=parametros)
    assert serializer.is_valid(), serializer.errors
    dados = dict(serializer.validated_data)
    dados.pop('esperar_aprovado')
    return EXECUTORES[tipo](construir_modelo(modelo), dados, contexto)


@pytest.fixture
def contexto(tmp_path):
    return ContextoExperimento(nome='teste', diretorio=tmp_path)


@pytest.mark.unit
class TestRegistroExecutores:
    """Testes da cobertura dos tipos"""

    def test_todo_tipo_tem_executor_e_esquema(self):
        """Testa correspondência entre tipos, executores e serializers"""
        tipos = {tipo for tipo, _ in TIPOS_EXPERIMENTO}
        assert set(EXECUTORES) == tipos
        assert set(PARAMETROS_POR_TIPO) == tipos


@pytest.mark.unit
class TestExecutorGeodesica:
    """Testes do executor de geodésicas"""

    def test_plano_com_destino(self, contexto):
        """Testa distância e aplicação log no plano"""
        resultado = executar('geodesic', {'tipo': 'euclidean'}, contexto, destino=[1.0, -2.0], tolerancia=1e-8)
        assert resultado.aprovado
        assert resultado.escalares['distancia'] == pytest.approx(math.sqrt(5.0), abs=1e-8)
        assert resultado.escalares['desvio_distancia'] < 1e-8
        assert (contexto.diretorio / 'geodesica.csv').exists()

    def test_h2_contra_oraculo(self, contexto):
        """Testa distância hiperbólica contra a fórmula fechada"""
        resultado = executar(
            'geodesic', {'tipo': 'hyperbolic_ball'}, contexto,
            destino=[0.3, 0.1], tolerancia=1e-5, tolerancia_distancia=1e-6,
        )
        assert resultado.aprovado
        assert resultado.escalares['desvio_distancia'] < 1e-6

    def test_ponto_com_dimensao_errada(self, contexto):
        """Testa ponto com coordenadas a mais"""
        with pytest.raises(ErroPrecondicao):
            executar('geodesic', {'tipo': 'euclidean'}, contexto, ponto=[0.0, 0.0, 0.0])

    def test_truncamento_vira_aviso(self, contexto):
        """Testa geodésica que deixa a carta estereográfica"""
        resultado = executar('geodesic', {'tipo': 'sphere2'}, contexto, T=4.0, autoverificar=False)
        assert resultado.escalares['truncado']
        assert 'geodesica_truncada' in resultado.avisos


@pytest.mark.unit
class TestExecutorFocal:
    """Testes da varredura focal"""

    def test_plano_sem_conjugados(self, contexto):
        """Testa plano aprovado com lista de conjugados vazia"""
        resultado = executar('focal-scan', {'tipo': 'euclidean'}, contexto, direcoes=4, T=5.0)
        assert resultado.aprovado
        assert resultado.escalares['monotona']
        assert all(tempos == [] for tempos in resultado.escalares['conjugados'])
        assert (contexto.diretorio / 'focal.csv').exists()

    def test_esfera_testemunha_pi_sobre_dois(self, contexto):
        """Testa S² reprovada com testemunha próxima de π/2"""
        resultado = executar(
            'focal-scan', {'tipo': 'sphere2'}, contexto, direcoes=2, T=3.0, testemunha_esperada=math.pi / 2,
        )
        assert not resultado.aprovado
        assert resultado.escalares['tempo_testemunha'] == pytest.approx(math.pi / 2, abs=1e-2)
        assert resultado.verificacoes == {'testemunha_esperada': True}

    def test_mudanca_de_sinal_no_torcido_oscilante(self, contexto):
        """Testa testemunhas de curvatura positiva e negativa no perfil oscilante"""
        resultado = executar(
            'focal-scan', {'tipo': 'warped', 'parametros': {'perfil': 'oscilante'}}, contexto,
            direcoes=1, T=5.0, exigir_mudanca_sinal=True,
        )
        assert resultado.verificacoes['mudanca_sinal_curvatura']
        assert resultado.escalares['curvatura_radial_max'] > 0.0 > resultado.escalares['curvatura_radial_min']


@pytest.mark.unit
class TestExecutoresDiversos:
    """Testes de executores de custo baixo"""

    def test_auditoria_h2(self, contexto):
        """Testa auditoria não positiva em H²"""
        resultado = executar('curvature-audit', {'tipo': 'hyperbolic_ball'}, contexto, amostras=4, t_max=2.0)
        assert resultado.aprovado
        assert resultado.escalares['veredito'] == 'nonpositive'

    def test_auditoria_esfera(self, contexto):
        """Testa auditoria positiva em S²"""
        resultado = executar('curvature-audit', {'tipo': 'sphere2'}, contexto, amostras=4, t_max=1.0)
        assert not resultado.aprovado

    def test_faixa_essencial_exige_curvatura_menos_um(self, contexto):
        """Testa modelo plano rejeitado pela faixa essencial"""
        with pytest.raises(ErroModeloNaoSuportado):
            executar('essential-range', {'tipo': 'euclidean'}, contexto)

    def test_faixa_essencial_h2(self, contexto):
        """Testa concordância e fundo h²/4 = 1/4 em H²"""
        resultado = executar(
            'essential-range', {'tipo': 'hyperbolic_ball'}, contexto,
            quantidade_x=5, passo_forca_bruta=1e-3, lambda_maximo=5.0, pontos_lambda=201,
        )
        assert resultado.aprovado
        assert resultado.escalares['fundo'] == 0.25
        assert resultado.escalares['pares'] == 15

    def test_razao_lambda_igualdade_no_plano(self, contexto):
        """Testa λ(s) = s no plano"""
        resultado = executar(
            'lambda-ratio', {'tipo': 'euclidean'}, contexto, geodesicas=1, t_max=5.0, direcoes=4, igualdade=True,
            amostras_auditoria=2, t_max_auditoria=1.0,
        )
        assert resultado.aprovado
        assert resultado.verificacoes == {'igualdade': True}

    def test_razao_lambda_esfera_diagnostico(self, contexto):
        """Testa violação reportada em S² no modo diagnóstico"""
        resultado = executar(
            'lambda-ratio', {'tipo': 'sphere2'}, contexto, geodesicas=1, t_max=2.0, direcoes=4, diagnostico=True,
        )
        assert not resultado.aprovado
        assert resultado.escalares['testemunha'] is not None

    def test_esferica_h3_forma_fechada(self, contexto):
        """Testa perfil em H³ contra sin(λr)/(λ sinh r)"""
        resultado = executar(
            'spherical', {'tipo': 'hyperbolic_ball', 'dimensao': 3}, contexto,
            frequencias=[1.0], r_max=5.0, pontos=501, pontos_relacao=0,
        )
        assert resultado.aprovado
        assert resultado.escalares['frequencias'][0]['desvio_forma_fechada'] < 1e-6
        assert (contexto.diretorio / 'funcao_esferica_0.csv').exists()


@pytest.mark.slow
class TestExecutoresLongos:
    """Testes de executores com agendas longas"""

    def test_jacobi_plano(self, contexto):
        """Testa D'(0) = 0 no plano"""
        resultado = executar('jacobi', {'tipo': 'euclidean'}, contexto, d0_linha_esperado=0.0)
        assert resultado.aprovado
        assert resultado.verificacoes['d0_linha_esperado']
        assert (contexto.diretorio / 'tensor_estavel.json').exists()

    def test_jacobi_h2(self, contexto):
        """Testa D'(0) = -Id e o sanduíche espectral em H²"""
        resultado = executar('jacobi', {'tipo': 'hyperbolic_upper'}, contexto, d0_linha_esperado=-1.0)
        assert resultado.aprovado
        assert resultado.verificacoes == {'sanduiche_espectral': True, 'd0_linha_esperado': True}

    def test_busemann_h2(self, contexto):
        """Testa valor e hessiano de Busemann contra o oráculo de H²"""
        resultado = executar(
            'busemann', {'tipo': 'hyperbolic_upper'}, contexto, pontos=4, raio=2.0, pontos_hessiano=2,
        )
        assert resultado.aprovado, resultado.escalares
        assert resultado.escalares['desvio_valor_maximo'] < 1e-4
        assert resultado.escalares['desvio_hessiano_maximo'] < 1e-3
        assert resultado.escalares['fora_da_cota'] == 0
        assert 'truncamento_busemann_fora_da_cota' not in resultado.avisos

    def test_radializacao_h2(self, contexto):
        """Testa idempotência e comutação com o laplaciano em H²"""
        resultado = executar(
            'radialisation', {'tipo': 'hyperbolic_ball'}, contexto,
            centro=[0.25, 0.0], raio_suporte=2.0, raio=3.0, ordem=64, passo=5e-3, limite_comutacao=1e-4,
        )
        assert resultado.escalares['desvio_idempotencia'] <= 1e-8
        assert resultado.aprovado
