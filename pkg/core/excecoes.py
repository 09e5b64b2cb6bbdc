"""
Hierarquia de exceções do laboratório.

Toda falha numérica ou de configuração herda de ErroLaboratorio, de modo que o
executor de experimentos possa registrá-la no manifesto e seguir adiante.
"""

from typing import Any, Dict, Iterable, List, Optional


class ErroLaboratorio(Exception):
    """Erro base do laboratório"""

    codigo = 'erro'

    def __init__(self, mensagem: str, **detalhes: Any):
        super().__init__(mensagem)
        self.mensagem = mensagem
        self.detalhes = detalhes

    def como_dict(self) -> Dict[str, Any]:
        """Representação serializável usada nos relatórios"""
        return {
            'codigo': self.codigo,
            'mensagem': self.mensagem,
            'detalhes': {chave: _serializavel(valor) for chave, valor in self.detalhes.items()},
        }


class ErroDominio(ErroLaboratorio):
    """Coordenadas fora do domínio da carta"""

    codigo = 'dominio'


class ErroPrecondicao(ErroLaboratorio):
    """Entrada viola uma pré-condição (referencial, dados triviais, plano degenerado)"""

    codigo = 'precondicao'


class ErroSingularidade(ErroLaboratorio):
    """Função não é suave no ponto pedido (ex.: r = d(p, ·) em p)"""

    codigo = 'singularidade'


class ErroConvergencia(ErroLaboratorio):
    """Iteração não convergiu; carrega resíduo ou diferenças finais"""

    codigo = 'convergencia'

    def __init__(self, mensagem: str, residuo: Optional[float] = None,
                 diferencas: Optional[Iterable[float]] = None, **detalhes: Any):
        super().__init__(mensagem, **detalhes)
        self.residuo = residuo
        self.diferencas = list(diferencas) if diferencas is not None else []
        self.detalhes['residuo'] = residuo
        self.detalhes['diferencas'] = self.diferencas


class ErroPontoConjugado(ErroLaboratorio):
    """Tensor fundamental singular: ponto conjugado ao longo da geodésica"""

    codigo = 'ponto_conjugado'

    def __init__(self, mensagem: str, tempo: float, **detalhes: Any):
        super().__init__(mensagem, tempo=tempo, **detalhes)
        self.tempo = tempo


class ErroHipotese(ErroLaboratorio):
    """Hipótese geométrica não auditada ou violada"""

    codigo = 'hipotese'


class ErroModeloNaoSuportado(ErroLaboratorio):
    """Operação não se aplica ao modelo informado"""

    codigo = 'modelo_nao_suportado'


class ErroDivergencia(ErroLaboratorio):
    """Quadratura ou integral divergente"""

    codigo = 'divergencia'


class ErroAjuste(ErroLaboratorio):
    """Ajuste de constantes falhou em toda a grade"""

    codigo = 'ajuste'


class ErroResultadoParcial(ErroLaboratorio):
    """Parte dos itens de um lote falhou; lista as falhas por índice"""

    codigo = 'resultado_parcial'

    def __init__(self, mensagem: str, falhas: Dict[int, ErroLaboratorio], **detalhes: Any):
        super().__init__(mensagem, **detalhes)
        self.falhas = falhas
        self.detalhes['falhas'] = {str(indice): erro.como_dict() for indice, erro in sorted(falhas.items())}


class ErroConfiguracao(ErroLaboratorio):
    """Configuração inválida; carrega os caminhos dos campos com problema"""

    codigo = 'configuracao'

    def __init__(self, mensagem: str, erros: Optional[Dict[str, List[str]]] = None):
        super().__init__(mensagem, erros=erros or {})
        self.erros = erros or {}


def _serializavel(valor: Any) -> Any:
    if hasattr(valor, 'tolist'):
        return valor.tolist()
    if isinstance(valor, dict):
        return {str(k): _serializavel(v) for k, v in valor.items()}
    if isinstance(valor, (list, tuple)):
        return [_serializavel(v) for v in valor]
    return valor
