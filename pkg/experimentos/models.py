import uuid

from django.db import models


class StatusExecucao(models.TextChoices):
    """Estados de uma execução de configuração"""
    EXECUTANDO = 'executando', 'Executando'
    APROVADA = 'aprovada', 'Aprovada'
    REPROVADA = 'reprovada', 'Reprovada'


class Veredito(models.TextChoices):
    """Veredito de um experimento dentro da execução"""
    APROVADO = 'pass', 'Aprovado'
    REPROVADO = 'fail', 'Reprovado'
    ERRO = 'error', 'Erro numérico'


class ExecucaoExperimento(models.Model):
    """
    Registro de uma execução de configuração: espelha o manifesto gravado em
    disco (hash da configuração, versões, semente, tempo de parede).
    """

    id = models.UUIDField(
        primary_key=True,
        default=uuid.uuid4,
        editable=False
    )

    nome = models.CharField(
        max_length=120,
        verbose_name='Nome'
    )

    configuracao = models.JSONField(
        verbose_name='Configuração validada'
    )

    hash_configuracao = models.CharField(
        max_length=64,
        db_index=True,
        verbose_name='Hash da configuração'
    )

    versoes = models.JSONField(
        default=dict,
        verbose_name='Versões'
    )

    semente = models.BigIntegerField(
        default=0,
        verbose_name='Semente'
    )

    threads = models.PositiveIntegerField(
        default=1,
        verbose_name='Threads'
    )

    diretorio_saida = models.CharField(
        max_length=500,
        verbose_name='Diretório de saída'
    )

    status = models.CharField(
        max_length=20,
        choices=StatusExecucao.choices,
        default=StatusExecucao.EXECUTANDO,
        verbose_name='Status'
    )

    iniciada_em = models.DateTimeField(
        auto_now_add=True,
        verbose_name='Iniciada em'
    )

    concluida_em = models.DateTimeField(
        null=True,
        blank=True,
        verbose_name='Concluída em'
    )

    tempo_parede = models.FloatField(
        null=True,
        blank=True,
        verbose_name='Tempo de parede (s)'
    )

    mensagem_erro = models.TextField(
        blank=True,
        verbose_name='Mensagem de erro'
    )

    class Meta:
        verbose_name = 'Execução de experimento'
        verbose_name_plural = 'Execuções de experimentos'
        ordering = ['-iniciada_em']
        indexes = [
            models.Index(fields=['status', '-iniciada_em'], name='exec_status_iniciada_idx'),
        ]

    def __str__(self):
        return f"{self.nome} ({self.hash_configuracao[:12]})"

    @property
    def aprovada(self) -> bool:
        return self.status == StatusExecucao.APROVADA


class ResultadoExperimento(models.Model):
    """Veredito e escalares de um experimento da execução"""

    execucao = models.ForeignKey(
        ExecucaoExperimento,
        on_delete=models.CASCADE,
        related_name='resultados',
        verbose_name='Execução'
    )

    ordem = models.PositiveIntegerField(
        verbose_name='Ordem'
    )

    nome = models.CharField(
        max_length=120,
        verbose_name='Nome'
    )

    tipo = models.CharField(
        max_length=40,
        verbose_name='Tipo'
    )

    veredito = models.CharField(
        max_length=10,
        choices=Veredito.choices,
        verbose_name='Veredito'
    )

    escalares = models.JSONField(
        default=dict,
        verbose_name='Escalares'
    )

    avisos = models.JSONField(
        default=list,
        verbose_name='Avisos'
    )

    mensagem_erro = models.TextField(
        blank=True,
        verbose_name='Mensagem de erro'
    )

    class Meta:
        verbose_name = 'Resultado de experimento'
        verbose_name_plural = 'Resultados de experimentos'
        ordering = ['execucao', 'ordem']
        unique_together = ['execucao', 'nome']

    def __str__(self):
        return f"{self.nome} [{self.tipo}] - {self.get_veredito_display()}"
