from typing import Any, Dict, List

from rest_framework import serializers
from rest_framework.settings import api_settings

from core.excecoes import ErroLaboratorio
from variedades.registro import REGISTRO, construir_modelo


TIPOS_EXPERIMENTO = [
    ('geodesic', 'Geodésica, aplicação log e distância'),
    ('jacobi', 'Campos e tensores de Jacobi'),
    ('focal-scan', 'Varredura de pontos focais e conjugados'),
    ('busemann', 'Funções de Busemann: valor, gradiente e hessiano'),
    ('convexity-cert', 'Certificado de convexidade estrita'),
    ('radial-constants', 'Constantes do teorema radial'),
    ('spectral', 'Curvatura média de horosferas, Cheeger e λ₀'),
    ('essential-range', 'Faixa essencial e densidade |c(λ)|⁻²'),
    ('rank-checks', 'Verificações de posto superior'),
    ('curvature-audit', 'Auditoria de curvatura radial'),
    ('lambda-ratio', 'Comparação λ(s) ≤ s'),
    ('spherical', 'Funções esféricas'),
    ('radialisation', 'Radialização e comutação com o laplaciano'),
    ('integral-curve', 'Curvas integrais de ∇b_v'),
]

EXTRAPOLACOES = ['richardson', 'nenhuma']


def validar_positivo(valor):
    """Tolerâncias, passos e raios são estritamente positivos"""
    if valor <= 0:
        raise serializers.ValidationError("Deve ser positivo.")
    return valor


def campo_positivo(**kwargs) -> serializers.FloatField:
    return serializers.FloatField(validators=[validar_positivo], **kwargs)


def campo_vetor(**kwargs) -> serializers.ListField:
    return serializers.ListField(child=serializers.FloatField(), min_length=1, **kwargs)


def campo_grade(**kwargs) -> serializers.ListField:
    return serializers.ListField(child=campo_positivo(), min_length=1, **kwargs)


class ModeloSerializer(serializers.Serializer):
    """Especificação de modelo: tipo do registro, dimensão, parâmetros e tolerâncias"""

    tipo = serializers.ChoiceField(
        choices=sorted(REGISTRO),
        error_messages={
            'invalid_choice': f'"{{input}}" não é um modelo registrado. Opções válidas: {", ".join(sorted(REGISTRO))}.'
        },
    )
    dimensao = serializers.IntegerField(min_value=1, default=2)
    parametros = serializers.DictField(default=dict)
    tolerancias = serializers.DictField(child=campo_positivo(), default=dict)
    fatores = serializers.ListField(child=serializers.DictField(), required=False)

    def validate_fatores(self, value):
        """Cada fator é um modelo completo"""
        validados, erros = [], {}
        for indice, fator in enumerate(value):
            serializer = ModeloSerializer(data=fator)
            if serializer.is_valid():
                validados.append(serializer.validated_data)
            else:
                erros[indice] = serializer.errors
        if erros:
            raise serializers.ValidationError(erros)
        return validados

    def validate(self, data):
        """Produtos exigem fatores; o modelo precisa ser construível"""
        if data['tipo'] == 'product' and len(data.get('fatores') or []) < 2:
            raise serializers.ValidationError({'fatores': ["Produto exige ao menos dois fatores."]})
        try:
            construir_modelo(data)
        except (ErroLaboratorio, ValueError, KeyError, TypeError) as erro:
            raise serializers.ValidationError({'parametros': [f"Modelo não construído: {erro}"]})
        return data


# Parâmetros por tipo de experimento

class ParametrosSerializer(serializers.Serializer):
    """Campos comuns a todos os tipos; chaves desconhecidas são rejeitadas"""

    ponto = campo_vetor(required=False)
    passo = campo_positivo(required=False)
    esperar_aprovado = serializers.BooleanField(default=True)

    def validate(self, data):
        desconhecidos = sorted(set(self.initial_data) - set(self.fields))
        if desconhecidos:
            raise serializers.ValidationError({chave: ["Parâmetro desconhecido."] for chave in desconhecidos})
        return data


class ParametrosBusemannMixin(serializers.Serializer):
    agenda = campo_grade(required=False)
    agenda_estavel = campo_grade(required=False)
    tolerancia = campo_positivo(required=False)
    extrapolacao = serializers.ChoiceField(choices=EXTRAPOLACOES, required=False)


class ParametrosGeodesicaSerializer(ParametrosSerializer):
    direcao = campo_vetor(required=False)
    T = campo_positivo(default=5.0)
    destino = campo_vetor(required=False)
    autoverificar = serializers.BooleanField(default=True)
    tolerancia = campo_positivo(default=1e-6)
    tolerancia_distancia = campo_positivo(default=1e-8)


class ParametrosJacobiSerializer(ParametrosSerializer):
    direcao = campo_vetor(required=False)
    T = campo_positivo(default=5.0)
    s = campo_positivo(required=False)
    y_linha0 = campo_vetor(required=False)
    tolerancia = campo_positivo(default=1e-6)
    agenda = campo_grade(required=False)
    tolerancia_estavel = campo_positivo(required=False)
    extrapolacao = serializers.ChoiceField(choices=EXTRAPOLACOES, required=False)
    d0_linha_esperado = serializers.FloatField(required=False)
    tolerancia_esperado = campo_positivo(default=1e-4)
    continuidade = serializers.IntegerField(min_value=0, default=0)

    def validate(self, data):
        data = super().validate(data)
        if 's' in data and data['s'] > data['T']:
            raise serializers.ValidationError({'s': ["Deve estar em (0, T]."]})
        return data


class ParametrosFocalSerializer(ParametrosSerializer):
    direcao = campo_vetor(required=False)
    direcoes = serializers.IntegerField(min_value=1, default=8)
    T = campo_positivo(default=10.0)
    testemunha_esperada = campo_positivo(required=False)
    tolerancia_testemunha = campo_positivo(default=1e-2)
    exigir_mudanca_sinal = serializers.BooleanField(default=False)


class ParametrosBusemannSerializer(ParametrosBusemannMixin, ParametrosSerializer):
    direcao = campo_vetor(required=False)
    pontos = serializers.IntegerField(min_value=1, default=50)
    raio = campo_positivo(default=5.0)
    pontos_hessiano = serializers.IntegerField(min_value=0, default=5)
    tolerancia_valor = campo_positivo(default=1e-4)
    tolerancia_hessiano = campo_positivo(default=1e-3)


class ParametrosConvexidadeSerializer(ParametrosSerializer):
    funcao = serializers.ChoiceField(choices=['averaged_F', 'exhaustion_f', 'distance_sq'], default='averaged_F')
    pontos = serializers.IntegerField(min_value=1, default=100)
    raio = campo_positivo(default=3.0)
    margem = campo_positivo(default=0.1)
    direcoes = serializers.IntegerField(min_value=1, default=64)
    medida = serializers.ChoiceField(choices=['uniforme', 'diadica'], default='uniforme')
    comparar_medidas = serializers.BooleanField(default=False)
    agenda = campo_grade(required=False)
    agenda_estavel = campo_grade(required=False)
    laplaciano_esperado = serializers.FloatField(required=False)
    tolerancia_laplaciano = campo_positivo(default=1e-3)
    bilaplaciano = serializers.BooleanField(default=False)
    passo_malha = campo_positivo(default=0.05)
    limite_bilaplaciano = campo_positivo(default=1e-2)


class ParametrosConstantesRadiaisSerializer(ParametrosSerializer):
    raio = campo_positivo(default=20.0)
    direcoes = serializers.IntegerField(min_value=1, default=8)
    passo_radial = campo_positivo(default=1e-2)
    auditar = serializers.BooleanField(default=True)
    amostras_auditoria = serializers.IntegerField(min_value=1, default=16)
    t_max_auditoria = campo_positivo(default=5.0)
    c1_esperado = serializers.FloatField(required=False)
    tolerancia_c1 = campo_positivo(default=1e-6)


class ParametrosEspectralSerializer(ParametrosSerializer):
    direcoes = serializers.IntegerField(min_value=1, default=32)
    quantidade_pontos = serializers.IntegerField(min_value=1, default=10)
    raio_pontos = campo_positivo(default=1.0)
    raios = campo_grade(default=[1.0, 2.0, 4.0, 8.0, 15.0])
    n_indice = serializers.IntegerField(min_value=1, default=100)
    raio = campo_positivo(required=False)
    ordem = serializers.IntegerField(min_value=1, required=False)
    agenda = campo_grade(required=False)
    agenda_estavel = campo_grade(required=False)
    h_esperado = serializers.FloatField(required=False)
    tolerancia_h = campo_positivo(default=1e-3)
    lambda0_esperado = campo_positivo(required=False)
    tolerancia_lambda0 = campo_positivo(default=5e-2)
    razao_final_esperada = campo_positivo(required=False)
    tolerancia_razao = campo_positivo(default=2e-2)
    dispersao_minima = campo_positivo(required=False)


class ParametrosFaixaEssencialSerializer(ParametrosSerializer):
    h = serializers.FloatField(min_value=0.0, required=False)
    x = serializers.ListField(child=serializers.FloatField(), min_length=1, required=False)
    quantidade_x = serializers.IntegerField(min_value=1, default=20)
    largura_x = campo_positivo(default=0.2)
    epsilons = campo_grade(default=[1e-3, 1e-2, 1e-1])
    lambda_maximo = campo_positivo(default=20.0)
    pontos_lambda = serializers.IntegerField(min_value=2, default=2001)
    passo_forca_bruta = campo_positivo(default=1e-4)


class ParametrosPostoSerializer(ParametrosBusemannMixin, ParametrosSerializer):
    direcoes = serializers.IntegerField(min_value=1, default=8)
    angulos = serializers.ListField(child=serializers.FloatField(), min_length=1, required=False)
    n_indice = serializers.IntegerField(min_value=1, default=10)
    raio = campo_positivo(default=8.0)
    ordem = serializers.IntegerField(min_value=1, default=4)
    passo_radial = campo_positivo(required=False)


class ParametrosAuditoriaSerializer(ParametrosSerializer):
    amostras = serializers.IntegerField(min_value=1, default=16)
    t_max = campo_positivo(default=5.0)
    registros = serializers.IntegerField(min_value=2, default=200)


class ParametrosRazaoLambdaSerializer(ParametrosSerializer):
    direcao = campo_vetor(required=False)
    geodesicas = serializers.IntegerField(min_value=1, default=4)
    t_max = campo_positivo(default=20.0)
    direcoes = serializers.IntegerField(min_value=1, default=16)
    diagnostico = serializers.BooleanField(default=False)
    amostras_auditoria = serializers.IntegerField(min_value=1, default=16)
    t_max_auditoria = campo_positivo(default=5.0)
    igualdade = serializers.BooleanField(default=False)
    tolerancia_igualdade = campo_positivo(default=1e-9)


class ParametrosEsfericaSerializer(ParametrosSerializer):
    frequencias = serializers.ListField(
        child=serializers.FloatField(min_value=0.0), min_length=1, default=[0.5, 1.0, 2.0],
    )
    r_max = campo_positivo(default=10.0)
    pontos = serializers.IntegerField(min_value=11, default=1001)
    pontos_relacao = serializers.IntegerField(min_value=0, default=4)
    raio_relacao = campo_positivo(default=0.5)
    passo_laplaciano = campo_positivo(default=1e-3)
    tolerancia_forma_fechada = campo_positivo(default=1e-6)
    tolerancia_autovalor = campo_positivo(default=1e-5)


class ParametrosRadializacaoSerializer(ParametrosSerializer):
    centro = campo_vetor(required=False)
    raio_suporte = campo_positivo(default=1.5)
    raio = campo_positivo(default=2.5)
    ordem = serializers.IntegerField(min_value=1, default=32)
    verificacoes = serializers.IntegerField(min_value=1, default=6)
    limite_comutacao = campo_positivo(default=1e-5)
    residuo_minimo = campo_positivo(required=False)
    tolerancia_idempotencia = campo_positivo(default=1e-8)


class ParametrosCurvaIntegralSerializer(ParametrosSerializer):
    direcao = campo_vetor(required=False)
    T = campo_positivo(default=5.0)
    agenda = campo_grade(required=False)
    tolerancia = campo_positivo(default=1e-8)


PARAMETROS_POR_TIPO = {
    'geodesic': ParametrosGeodesicaSerializer,
    'jacobi': ParametrosJacobiSerializer,
    'focal-scan': ParametrosFocalSerializer,
    'busemann': ParametrosBusemannSerializer,
    'convexity-cert': ParametrosConvexidadeSerializer,
    'radial-constants': ParametrosConstantesRadiaisSerializer,
    'spectral': ParametrosEspectralSerializer,
    'essential-range': ParametrosFaixaEssencialSerializer,
    'rank-checks': ParametrosPostoSerializer,
    'curvature-audit': ParametrosAuditoriaSerializer,
    'lambda-ratio': ParametrosRazaoLambdaSerializer,
    'spherical': ParametrosEsfericaSerializer,
    'radialisation': ParametrosRadializacaoSerializer,
    'integral-curve': ParametrosCurvaIntegralSerializer,
}


# Configuração

class ExperimentoSerializer(serializers.Serializer):
    """Um experimento: nome único, tipo, parâmetros e, opcionalmente, o próprio modelo"""

    nome = serializers.RegexField(r'^[A-Za-z0-9_.-]+$', max_length=120)
    tipo = serializers.ChoiceField(
        choices=TIPOS_EXPERIMENTO,
        error_messages={
            'invalid_choice': (
                f'"{{input}}" não é um tipo de experimento. '
                f'Opções válidas: {", ".join(tipo for tipo, _ in TIPOS_EXPERIMENTO)}.'
            )
        },
    )
    parametros = serializers.DictField(default=dict)
    modelo = ModeloSerializer(required=False)

    def validate(self, data):
        """Valida os parâmetros contra o esquema do tipo"""
        serializer = PARAMETROS_POR_TIPO[data['tipo']](data=data.get('parametros') or {})
        if not serializer.is_valid():
            raise serializers.ValidationError({'parametros': serializer.errors})
        data['parametros'] = serializer.validated_data
        return data


class ConfiguracaoSerializer(serializers.Serializer):
    """Configuração de execução: modelo global, semente, threads e lista de experimentos"""

    nome = serializers.RegexField(r'^[A-Za-z0-9_.-]+$', max_length=120)
    semente = serializers.IntegerField(min_value=0, default=0)
    threads = serializers.IntegerField(min_value=1, default=1)
    saida = serializers.CharField(required=False, allow_blank=False)
    modelo = ModeloSerializer(required=False)
    experimentos = ExperimentoSerializer(many=True, allow_empty=False)

    def validate_experimentos(self, value):
        """Nomes únicos: cada experimento aparece uma vez no manifesto"""
        vistos = set()
        for experimento in value:
            if experimento['nome'] in vistos:
                raise serializers.ValidationError(f"Nome de experimento repetido: {experimento['nome']}.")
            vistos.add(experimento['nome'])
        return value

    def validate(self, data):
        """Sem modelo global, todo experimento precisa do seu"""
        if 'modelo' not in data:
            erros = {
                indice: {'modelo': ["Obrigatório quando a configuração não define um modelo global."]}
                for indice, experimento in enumerate(data['experimentos'])
                if 'modelo' not in experimento
            }
            if erros:
                raise serializers.ValidationError({'experimentos': erros})
        return data


def achatar_erros(erros: Any, prefixo: str = '') -> Dict[str, List[str]]:
    """
    Converte o detalhe aninhado do DRF em caminhos de campo, por exemplo
    ``experimentos[0].parametros.tolerancia``.
    """
    planos: Dict[str, List[str]] = {}

    def juntar(caminho: str, mensagens: List[str]):
        planos.setdefault(caminho or 'configuracao', []).extend(mensagens)

    if isinstance(erros, dict):
        for chave, valor in erros.items():
            if isinstance(chave, int) or str(chave).isdigit():
                caminho = f'{prefixo}[{chave}]'
            elif chave == api_settings.NON_FIELD_ERRORS_KEY:
                caminho = prefixo
            else:
                caminho = f'{prefixo}.{chave}' if prefixo else str(chave)
            for subcaminho, mensagens in achatar_erros(valor, caminho).items():
                juntar(subcaminho, mensagens)
    elif isinstance(erros, (list, tuple)):
        if all(isinstance(item, str) for item in erros):
            juntar(prefixo, [str(item) for item in erros])
        else:
            for indice, item in enumerate(erros):
                for subcaminho, mensagens in achatar_erros(item, f'{prefixo}[{indice}]').items():
                    juntar(subcaminho, mensagens)
    elif erros:
        juntar(prefixo, [str(erros)])
    return planos
