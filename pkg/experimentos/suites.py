"""
Suítes nomeadas de aceitação.

Cada suíte é uma configuração de experimentos pronta, montada por uma
função; ``completa`` concatena todas. Nomes de experimento são prefixados
pela suíte para continuarem únicos na concatenação.
"""

import math
from typing import Callable, Dict, List

EUCLIDIANO_2 = {'tipo': 'euclidean', 'dimensao': 2}
EUCLIDIANO_3 = {'tipo': 'euclidean', 'dimensao': 3}
H2 = {'tipo': 'hyperbolic_ball', 'dimensao': 2}
H3 = {'tipo': 'hyperbolic_ball', 'dimensao': 3}
H2_SEMIESPACO = {'tipo': 'hyperbolic_upper', 'dimensao': 2}
S2 = {'tipo': 'sphere2'}
TORCIDO_CUBICO = {'tipo': 'warped', 'dimensao': 2, 'parametros': {'perfil': 'r_mais_r3', 'raio_maximo': 22.0}}
TORCIDO_OSCILANTE = {'tipo': 'warped', 'dimensao': 2, 'parametros': {'perfil': 'oscilante', 'raio_maximo': 22.0}}
H2_X_R = {'tipo': 'product', 'fatores': [H2, {'tipo': 'euclidean', 'dimensao': 1}]}
H2_X_H2 = {'tipo': 'product', 'fatores': [H2_SEMIESPACO, H2_SEMIESPACO]}

AGENDA_LONGA = [10.0, 15.0, 20.0, 25.0, 30.0]


def _experimento(nome: str, tipo: str, modelo: Dict, **parametros) -> Dict:
    return {'nome': nome, 'tipo': tipo, 'modelo': modelo, 'parametros': parametros}


def _configuracao(nome: str, experimentos: List[Dict]) -> Dict:
    return {'nome': nome, 'semente': 0, 'experimentos': experimentos}


def suite_padrao() -> Dict:
    """Configuração padrão: varredura focal no plano"""
    return _configuracao('padrao', [
        _experimento('focal_plano', 'focal-scan', EUCLIDIANO_2),
    ])


def suite_plana() -> Dict:
    experimentos = []
    for modelo, rotulo in ((EUCLIDIANO_2, 'r2'), (EUCLIDIANO_3, 'r3')):
        destino = [1.0, -2.0] if modelo['dimensao'] == 2 else [1.0, -2.0, 0.5]
        experimentos += [
            _experimento(f'geodesica_{rotulo}', 'geodesic', modelo, destino=destino, tolerancia=1e-8),
            _experimento(
                f'busemann_{rotulo}', 'busemann', modelo,
                pontos=20, tolerancia_valor=1e-8, tolerancia_hessiano=1e-8,
            ),
            _experimento(f'jacobi_{rotulo}', 'jacobi', modelo, d0_linha_esperado=0.0, tolerancia_esperado=1e-8),
            _experimento(f'razao_lambda_{rotulo}', 'lambda-ratio', modelo, igualdade=True),
        ]
    return _configuracao('plana', experimentos)


def suite_hiperbolica() -> Dict:
    experimentos = []
    for modelo, rotulo in ((H2, 'h2'), (H3, 'h3')):
        experimentos += [
            _experimento(
                f'busemann_{rotulo}', 'busemann', modelo,
                pontos=50, raio=5.0, agenda=AGENDA_LONGA, tolerancia_valor=1e-4, tolerancia_hessiano=1e-3,
            ),
            _experimento(
                f'jacobi_{rotulo}', 'jacobi', modelo,
                agenda=AGENDA_LONGA, d0_linha_esperado=-1.0, tolerancia_esperado=1e-4,
            ),
        ]
    return _configuracao('hiperbolica', experimentos)


def suite_curvatura_media() -> Dict:
    return _configuracao('curvatura_media', [
        _experimento(f'h_{rotulo}', 'spectral', modelo, direcoes=32, quantidade_pontos=10,
                     h_esperado=float(modelo['dimensao'] - 1), tolerancia_h=1e-3)
        for modelo, rotulo in ((H2, 'h2'), (H3, 'h3'))
    ] + [
        _experimento('h_h2_x_r', 'spectral', H2_X_R, direcoes=32, quantidade_pontos=10, dispersao_minima=0.5),
    ])


def suite_cheeger() -> Dict:
    return _configuracao('cheeger', [
        _experimento(
            'cheeger_h2', 'spectral', H2,
            raios=[1.0, 2.0, 4.0, 8.0, 15.0], n_indice=100, h_esperado=1.0,
            lambda0_esperado=(1.0 + 1.0 / 100) ** 2 / 4.0, razao_final_esperada=1.0,
        ),
    ])


def suite_faixa_essencial() -> Dict:
    return _configuracao('faixa_essencial', [
        _experimento(f'faixa_{rotulo}', 'essential-range', modelo, quantidade_x=20)
        for modelo, rotulo in ((H2, 'h2'), (H3, 'h3'))
    ])


def suite_esferica() -> Dict:
    return _configuracao('esferica', [
        _experimento('esferica_h3', 'spherical', H3, frequencias=[0.5, 1.0, 2.0], r_max=10.0, pontos_relacao=0),
        _experimento('esferica_h2', 'spherical', H2, frequencias=[0.5, 1.0], r_max=5.0, pontos_relacao=4,
                     tolerancia_autovalor=1e-6),
    ])


def suite_razao_lambda() -> Dict:
    return _configuracao('razao_lambda', [
        _experimento('razao_h2', 'lambda-ratio', H2_SEMIESPACO, t_max=20.0, direcoes=16),
        _experimento('razao_h3', 'lambda-ratio', {'tipo': 'hyperbolic_upper', 'dimensao': 3},
                     t_max=20.0, direcoes=16),
        _experimento('razao_cubico', 'lambda-ratio', TORCIDO_CUBICO, t_max=20.0, direcoes=16),
        _experimento('razao_r2', 'lambda-ratio', EUCLIDIANO_2, t_max=20.0, igualdade=True),
        _experimento('razao_s2', 'lambda-ratio', S2, t_max=3.0, diagnostico=True, esperar_aprovado=False),
    ])


def suite_focal() -> Dict:
    return _configuracao('focal', [
        _experimento('focal_s2', 'focal-scan', S2, T=3.0, testemunha_esperada=math.pi / 2,
                     esperar_aprovado=False),
        _experimento('focal_h2', 'focal-scan', H2_SEMIESPACO, T=20.0),
        _experimento('focal_oscilante', 'focal-scan', TORCIDO_OSCILANTE, T=20.0, exigir_mudanca_sinal=True),
    ])


def suite_convexidade() -> Dict:
    return _configuracao('convexidade', [
        _experimento(
            'convexidade_h2', 'convexity-cert', H2,
            funcao='averaged_F', direcoes=64, pontos=100, raio=3.0, margem=0.1,
            laplaciano_esperado=1.0, bilaplaciano=True,
        ),
        _experimento(
            'convexidade_r2', 'convexity-cert', EUCLIDIANO_2,
            funcao='averaged_F', direcoes=64, pontos=100, raio=3.0, margem=1e-6, esperar_aprovado=False,
        ),
    ])


def suite_constantes_radiais() -> Dict:
    return _configuracao('constantes_radiais', [
        _experimento('constantes_r3', 'radial-constants', EUCLIDIANO_3, raio=20.0, c1_esperado=0.0),
        _experimento('constantes_h2', 'radial-constants', H2_SEMIESPACO, raio=10.0),
        _experimento('constantes_cubico', 'radial-constants', TORCIDO_CUBICO, raio=10.0),
    ])


def suite_posto_superior() -> Dict:
    return _configuracao('posto_superior', [
        _experimento('posto_h2_x_h2', 'rank-checks', H2_X_H2, direcoes=64),
    ])


def suite_radializacao() -> Dict:
    return _configuracao('radializacao', [
        _experimento(
            'radializacao_h2', 'radialisation', H2,
            centro=[0.25, 0.0], raio_suporte=2.0, raio=3.0, ordem=64, passo=5e-3,
        ),
        _experimento(
            'radializacao_h2_x_r', 'radialisation', H2_X_R,
            centro=[0.25, 0.0, 0.0], raio_suporte=2.0, raio=3.0, ordem=16, residuo_minimo=1e-2,
            esperar_aprovado=False,
        ),
    ])


SUITES: Dict[str, Callable[[], Dict]] = {
    'padrao': suite_padrao,
    'plana': suite_plana,
    'hiperbolica': suite_hiperbolica,
    'curvatura_media': suite_curvatura_media,
    'cheeger': suite_cheeger,
    'faixa_essencial': suite_faixa_essencial,
    'esferica': suite_esferica,
    'razao_lambda': suite_razao_lambda,
    'focal': suite_focal,
    'convexidade': suite_convexidade,
    'constantes_radiais': suite_constantes_radiais,
    'posto_superior': suite_posto_superior,
    'radializacao': suite_radializacao,
}


def suite_completa() -> Dict:
    experimentos = []
    for nome, construtor in SUITES.items():
        if nome == 'padrao':
            continue
        for experimento in construtor()['experimentos']:
            experimentos.append(dict(experimento, nome=f"{nome}.{experimento['nome']}"))
    return _configuracao('completa', experimentos)


SUITES['completa'] = suite_completa


def obter_suite(nome: str) -> Dict:
    if nome not in SUITES:
        raise KeyError(nome)
    return SUITES[nome]()
