from django.core.management.base import BaseCommand, CommandError

from core.excecoes import ErroConfiguracao
from experimentos.models import Veredito
from experimentos.services import ManifestoExecucao


class ComandoExperimento(BaseCommand):
    """Base dos comandos que executam configurações"""

    def add_arguments(self, parser):
        parser.add_argument(
            '--threads',
            type=int,
            help='Número de threads do pool de trabalho',
        )

        parser.add_argument(
            '--seed',
            type=int,
            help='Semente que substitui a da configuração',
        )

        parser.add_argument(
            '--out',
            help='Diretório de saída dos relatórios',
        )

        parser.add_argument(
            '--strict',
            action='store_true',
            help='Avisos de diagnóstico também tornam a saída não nula',
        )

    def escrever_erros_configuracao(self, erro: ErroConfiguracao):
        self.stderr.write(self.style.ERROR(erro.mensagem))
        for campo, mensagens in sorted(erro.erros.items()):
            for mensagem in mensagens:
                self.stderr.write(f'  {campo}: {mensagem}')

    def relatar(self, manifesto: ManifestoExecucao, estrito: bool):
        """Imprime o veredito de cada experimento e encerra com o código de saída"""
        for resultado in manifesto.resultados:
            linha = f'[{resultado.veredito}] {resultado.nome} ({resultado.tipo})'
            if resultado.veredito == Veredito.APROVADO:
                self.stdout.write(self.style.SUCCESS(linha))
            elif resultado.veredito == Veredito.REPROVADO:
                self.stdout.write(self.style.WARNING(linha))
            else:
                self.stdout.write(self.style.ERROR(f"{linha}: {resultado.erro['mensagem']}"))
            for aviso in resultado.avisos:
                self.stdout.write(f'    aviso: {aviso}')

        self.stdout.write(f'Manifesto: {manifesto.diretorio / "manifesto.json"}')
        self.stdout.write(f'Hash da configuração: {manifesto.hash_configuracao}')
        codigo = manifesto.codigo_saida(estrito)
        if codigo:
            reprovados = sum(not resultado.aprovado for resultado in manifesto.resultados)
            raise CommandError(
                f'{reprovados} de {len(manifesto.resultados)} experimento(s) sem aprovação'
                if reprovados else f'{len(manifesto.avisos)} aviso(s) em modo estrito',
                returncode=codigo,
            )
        self.stdout.write(self.style.SUCCESS(
            f'Execução concluída: {len(manifesto.resultados)} experimento(s) aprovado(s) '
            f'em {manifesto.tempo_parede:.1f}s'
        ))
