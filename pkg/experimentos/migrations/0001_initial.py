from django.db import migrations, models
import django.db.models.deletion
import uuid


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='ExecucaoExperimento',
            fields=[
                ('id', models.UUIDField(default=uuid.uuid4, editable=False, primary_key=True, serialize=False)),
                ('nome', models.CharField(max_length=120, verbose_name='Nome')),
                ('configuracao', models.JSONField(verbose_name='Configuração validada')),
                ('hash_configuracao', models.CharField(db_index=True, max_length=64, verbose_name='Hash da configuração')),
                ('versoes', models.JSONField(default=dict, verbose_name='Versões')),
                ('semente', models.BigIntegerField(default=0, verbose_name='Semente')),
                ('threads', models.PositiveIntegerField(default=1, verbose_name='Threads')),
                ('diretorio_saida', models.CharField(max_length=500, verbose_name='Diretório de saída')),
                ('status', models.CharField(choices=[('executando', 'Executando'), ('aprovada', 'Aprovada'), ('reprovada', 'Reprovada')], default='executando', max_length=20, verbose_name='Status')),
                ('iniciada_em', models.DateTimeField(auto_now_add=True, verbose_name='Iniciada em')),
                ('concluida_em', models.DateTimeField(blank=True, null=True, verbose_name='Concluída em')),
                ('tempo_parede', models.FloatField(blank=True, null=True, verbose_name='Tempo de parede (s)')),
                ('mensagem_erro', models.TextField(blank=True, verbose_name='Mensagem de erro')),
            ],
            options={
                'verbose_name': 'Execução de experimento',
                'verbose_name_plural': 'Execuções de experimentos',
                'ordering': ['-iniciada_em'],
                'indexes': [models.Index(fields=['status', '-iniciada_em'], name='exec_status_iniciada_idx')],
            },
        ),
        migrations.CreateModel(
            name='ResultadoExperimento',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('ordem', models.PositiveIntegerField(verbose_name='Ordem')),
                ('nome', models.CharField(max_length=120, verbose_name='Nome')),
                ('tipo', models.CharField(max_length=40, verbose_name='Tipo')),
                ('veredito', models.CharField(choices=[('pass', 'Aprovado'), ('fail', 'Reprovado'), ('error', 'Erro numérico')], max_length=10, verbose_name='Veredito')),
                ('escalares', models.JSONField(default=dict, verbose_name='Escalares')),
                ('avisos', models.JSONField(default=list, verbose_name='Avisos')),
                ('mensagem_erro', models.TextField(blank=True, verbose_name='Mensagem de erro')),
                ('execucao', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='resultados', to='experimentos.execucaoexperimento', verbose_name='Execução')),
            ],
            options={
                'verbose_name': 'Resultado de experimento',
                'verbose_name_plural': 'Resultados de experimentos',
                'ordering': ['execucao', 'ordem'],
                'unique_together': {('execucao', 'nome')},
            },
        ),
    ]
