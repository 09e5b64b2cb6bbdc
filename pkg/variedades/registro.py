"""
Registro de modelos disponíveis e construção a partir de especificações.

Especificação (dict vindo da configuração de experimento):
    {"tipo": "hyperbolic_ball", "dimensao": 2, "parametros": {}, "tolerancias": {}}
    {"tipo": "warped", "dimensao": 2, "parametros": {"perfil": "r_mais_r3", "carta": "normal"}}
    {"tipo": "product", "fatores": [{...}, {...}]}
"""

from dataclasses import dataclass
from typing import Callable, Dict, List

from core.excecoes import ErroConfiguracao

from .modelos import (
    VariedadeCarta, bola_hiperbolica, esfera2, euclidiano, produto, produto_torcido, semiespaco_hiperbolico,
)


@dataclass(frozen=True)
class EntradaRegistro:
    construtor: Callable[..., VariedadeCarta]
    descricao: str
    exemplo: Dict


def _construir_torcido(dimensao: int = 2, parametros: Dict = None) -> VariedadeCarta:
    parametros = parametros or {}
    perfil = parametros.get('perfil', parametros.get('coeficientes', 'r_mais_r3'))
    return produto_torcido(
        perfil,
        dimensao=dimensao,
        carta=parametros.get('carta', 'normal'),
        raio_maximo=parametros.get('raio_maximo'),
    )


REGISTRO: Dict[str, EntradaRegistro] = {
    'euclidean': EntradaRegistro(
        lambda dimensao=2, parametros=None: euclidiano(dimensao),
        'Espaço euclidiano R^n (plano)',
        {'tipo': 'euclidean', 'dimensao': 2},
    ),
    'hyperbolic_ball': EntradaRegistro(
        lambda dimensao=2, parametros=None: bola_hiperbolica(dimensao),
        'H^n no modelo da bola de Poincaré',
        {'tipo': 'hyperbolic_ball', 'dimensao': 2},
    ),
    'hyperbolic_upper': EntradaRegistro(
        lambda dimensao=2, parametros=None: semiespaco_hiperbolico(dimensao),
        'H^n no semiespaço superior (horizontes longos)',
        {'tipo': 'hyperbolic_upper', 'dimensao': 2},
    ),
    'sphere2': EntradaRegistro(
        lambda dimensao=2, parametros=None: esfera2(),
        'Esfera S² em projeção estereográfica (contraexemplo)',
        {'tipo': 'sphere2'},
    ),
    'warped': EntradaRegistro(
        _construir_torcido,
        'Produto torcido dr² + φ(r)² g_S (perfil embutido ou coeficientes ímpares)',
        {'tipo': 'warped', 'dimensao': 2, 'parametros': {'perfil': 'r_mais_r3'}},
    ),
    'product': EntradaRegistro(
        None,
        'Produto riemanniano de dois modelos',
        {'tipo': 'product', 'fatores': [{'tipo': 'hyperbolic_ball', 'dimensao': 2},
                                        {'tipo': 'euclidean', 'dimensao': 1}]},
    ),
}


def construir_modelo(especificacao: Dict) -> VariedadeCarta:
    """Constrói o modelo descrito por ``especificacao`` (já validada)"""
    tipo = especificacao.get('tipo')
    if tipo not in REGISTRO:
        raise ErroConfiguracao(
            f'Modelo desconhecido: {tipo}',
            {'modelo.tipo': [f'Opções válidas: {", ".join(sorted(REGISTRO))}.']},
        )
    if tipo == 'product':
        fatores = especificacao.get('fatores') or []
        if len(fatores) < 2:
            raise ErroConfiguracao('Produto exige ao menos dois fatores', {'modelo.fatores': ['Mínimo de 2.']})
        modelo = construir_modelo(fatores[0])
        for fator in fatores[1:]:
            modelo = produto(modelo, construir_modelo(fator))
    else:
        modelo = REGISTRO[tipo].construtor(
            dimensao=especificacao.get('dimensao', 2),
            parametros=especificacao.get('parametros') or {},
        )
    tolerancias = especificacao.get('tolerancias') or {}
    return modelo.com_tolerancias(tolerancias) if tolerancias else modelo


def listar_modelos() -> List[Dict]:
    """Descrição de cada entrada do registro, com as bandeiras da instância de exemplo"""
    catalogo = []
    for nome in sorted(REGISTRO):
        entrada = REGISTRO[nome]
        instancia = construir_modelo(entrada.exemplo)
        catalogo.append({
            'tipo': nome,
            'descricao': entrada.descricao,
            'exemplo': entrada.exemplo,
            'instancia': instancia.descrever(),
        })
    return catalogo
