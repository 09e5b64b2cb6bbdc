"""
Escrita de relatórios CSV/JSON reprodutíveis.

Floats são formatados com ``DIGITOS`` algarismos significativos (padrão 17),
chaves JSON ordenadas e separadores fixos: mesma entrada, mesmos bytes.
"""

import csv
import hashlib
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .configuracao import parametro


def formatar_float(valor: float, digitos: int = None) -> str:
    digitos = parametro('DIGITOS') if digitos is None else digitos
    valor = float(valor)
    if math.isnan(valor):
        return 'nan'
    if math.isinf(valor):
        return 'inf' if valor > 0 else '-inf'
    return format(valor, f'.{digitos}g')


def normalizar(valor: Any, digitos: int = None) -> Any:
    """Converte arrays/escalares numpy em estruturas JSON; floats viram texto fixo"""
    if isinstance(valor, np.ndarray):
        return [normalizar(item, digitos) for item in valor.tolist()]
    if isinstance(valor, (np.floating, float)):
        return _FloatFixo(formatar_float(valor, digitos))
    if isinstance(valor, (np.integer,)):
        return int(valor)
    if isinstance(valor, (np.bool_,)):
        return bool(valor)
    if isinstance(valor, dict):
        return {str(chave): normalizar(item, digitos) for chave, item in valor.items()}
    if isinstance(valor, (list, tuple)):
        return [normalizar(item, digitos) for item in valor]
    if isinstance(valor, Path):
        return str(valor)
    return valor


class _FloatFixo(float):
    """Float já formatado; o codificador emite o texto sem reformatar"""

    def __new__(cls, texto: str):
        instancia = super().__new__(cls, float(texto))
        instancia.texto = texto
        return instancia


class _CodificadorFixo(json.JSONEncoder):
    def iterencode(self, o, _one_shot=False):
        return _emitir(o, self.indent, 0)


def _emitir(valor: Any, indentacao: int, nivel: int):
    espaco = '\n' + ' ' * (indentacao * (nivel + 1)) if indentacao else ''
    fim = '\n' + ' ' * (indentacao * nivel) if indentacao else ''
    if isinstance(valor, _FloatFixo):
        texto = valor.texto
        yield texto if texto not in ('nan', 'inf', '-inf') else json.dumps(texto)
    elif isinstance(valor, dict):
        if not valor:
            yield '{}'
            return
        yield '{'
        for indice, chave in enumerate(sorted(valor)):
            if indice:
                yield ','
            yield espaco + json.dumps(chave) + ': '
            yield from _emitir(valor[chave], indentacao, nivel + 1)
        yield fim + '}'
    elif isinstance(valor, list):
        if not valor:
            yield '[]'
            return
        yield '['
        for indice, item in enumerate(valor):
            if indice:
                yield ','
            yield espaco
            yield from _emitir(item, indentacao, nivel + 1)
        yield fim + ']'
    else:
        yield json.dumps(valor)


def dumps_json(dados: Any) -> str:
    """JSON determinístico com floats de precisão fixa"""
    return json.dumps(normalizar(dados), cls=_CodificadorFixo, indent=2) + '\n'


def escrever_json(caminho: Path, dados: Any) -> Path:
    caminho = Path(caminho)
    caminho.parent.mkdir(parents=True, exist_ok=True)
    caminho.write_text(dumps_json(dados), encoding='utf-8')
    return caminho


def escrever_csv(caminho: Path, cabecalho: Sequence[str], linhas: Iterable[Sequence[Any]]) -> Path:
    """CSV com floats formatados; valores não numéricos passam como texto"""
    caminho = Path(caminho)
    caminho.parent.mkdir(parents=True, exist_ok=True)
    with caminho.open('w', newline='', encoding='utf-8') as arquivo:
        escritor = csv.writer(arquivo, lineterminator='\n')
        escritor.writerow(cabecalho)
        for linha in linhas:
            escritor.writerow([_celula(valor) for valor in linha])
    return caminho


def _celula(valor: Any) -> str:
    if isinstance(valor, (bool, np.bool_)):
        return 'true' if valor else 'false'
    if isinstance(valor, (int, np.integer)):
        return str(int(valor))
    if isinstance(valor, (float, np.floating)):
        return formatar_float(valor)
    return str(valor)


def hash_configuracao(configuracao: Any) -> str:
    """SHA-256 do JSON canônico da configuração"""
    bruto = json.dumps(configuracao, sort_keys=True, separators=(',', ':'), default=str).encode()
    return hashlib.sha256(bruto).hexdigest()
