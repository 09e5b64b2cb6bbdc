"""
Acesso aos parâmetros numéricos do laboratório.

Lê o dict ``settings.LABORATORIO``; fora de um projeto Django configurado
usa os padrões abaixo, permitindo uso das rotinas como biblioteca.
"""

from typing import Any

from django.conf import settings

PADROES = {
    'PASSO_INTEGRACAO': 1e-3,
    'PASSOS_MAXIMOS_TIRO': 20000,
    'THREADS': 1,
    'DIRETORIO_SAIDA': 'resultados',
    'AGENDA_ESTAVEL': [5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
    'TOLERANCIA_ESTAVEL': 1e-6,
    'AGENDA_BUSEMANN': [5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
    'TOLERANCIA_BUSEMANN': 1e-5,
    'RAIO_BUSEMANN': 5.0,
    'TOLERANCIA_TIRO': 1e-10,
    'ITERACOES_TIRO': 40,
    'PASSO_DIFERENCAS': 1e-5,
    'PASSO_BUSEMANN': 1e-2,
    'RAIO_ESPECTRAL': 12.0,
    'ORDEM_ANGULAR': 8,
    'DIGITOS': 17,
    'REGISTRAR_EXECUCOES': True,
}


def parametro(nome: str) -> Any:
    """Retorna o parâmetro ``nome`` do laboratório"""
    if settings.configured:
        valores = getattr(settings, 'LABORATORIO', {})
        if nome in valores:
            return valores[nome]
    if nome not in PADROES:
        raise KeyError(f'Parâmetro desconhecido do laboratório: {nome}')
    return PADROES[nome]
