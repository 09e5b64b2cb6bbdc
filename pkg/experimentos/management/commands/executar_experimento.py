from django.core.management.base import CommandError

from core.excecoes import ErroConfiguracao
from experimentos.services import carregar_configuracao, executar_configuracao

from ._comum import ComandoExperimento


class Command(ComandoExperimento):
    """Executa uma configuração de experimentos"""

    help = 'Executa os experimentos de um arquivo de configuração JSON e grava os relatórios'

    def add_arguments(self, parser):
        parser.add_argument('config', help='Caminho do arquivo de configuração')
        super().add_arguments(parser)

    def handle(self, *args, **options):
        try:
            dados = carregar_configuracao(options['config'])
            manifesto = executar_configuracao(
                dados, threads=options['threads'], semente=options['seed'], saida=options['out'],
            )
        except ErroConfiguracao as erro:
            self.escrever_erros_configuracao(erro)
            raise CommandError('Configuração inválida', returncode=2)

        self.relatar(manifesto, options['strict'])
