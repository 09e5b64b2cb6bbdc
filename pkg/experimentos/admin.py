from django.contrib import admin

from .models import ExecucaoExperimento, ResultadoExperimento


class ResultadoExperimentoInline(admin.TabularInline):
    model = ResultadoExperimento
    extra = 0
    fields = ['ordem', 'nome', 'tipo', 'veredito', 'mensagem_erro']
    readonly_fields = fields
    can_delete = False


@admin.register(ExecucaoExperimento)
class ExecucaoExperimentoAdmin(admin.ModelAdmin):
    """Administração das execuções registradas"""

    list_display = [
        'nome', 'status', 'semente', 'threads', 'tempo_parede', 'iniciada_em'
    ]

    list_filter = ['status', 'iniciada_em']

    search_fields = ['nome', 'hash_configuracao']

    readonly_fields = [
        'id', 'hash_configuracao', 'versoes', 'iniciada_em', 'concluida_em', 'tempo_parede'
    ]

    fieldsets = (
        ('Informações Básicas', {
            'fields': ('id', 'nome', 'status', 'semente', 'threads', 'diretorio_saida')
        }),
        ('Reprodutibilidade', {
            'fields': ('hash_configuracao', 'versoes', 'configuracao'),
            'classes': ('collapse',)
        }),
        ('Tempos', {
            'fields': ('iniciada_em', 'concluida_em', 'tempo_parede')
        }),
        ('Erros', {
            'fields': ('mensagem_erro',),
            'classes': ('collapse',)
        }),
    )

    inlines = [ResultadoExperimentoInline]


@admin.register(ResultadoExperimento)
class ResultadoExperimentoAdmin(admin.ModelAdmin):
    """Administração dos resultados por experimento"""

    list_display = ['nome', 'tipo', 'veredito', 'execucao', 'ordem']
    list_filter = ['tipo', 'veredito']
    search_fields = ['nome', 'execucao__nome']
