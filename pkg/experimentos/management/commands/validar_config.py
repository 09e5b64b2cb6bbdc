from django.core.management.base import BaseCommand, CommandError

from core.excecoes import ErroConfiguracao
from experimentos.services import carregar_configuracao, validar_configuracao


class Command(BaseCommand):
    """Valida uma configuração sem executá-la"""

    help = 'Valida um arquivo de configuração e lista os erros por campo'

    def add_arguments(self, parser):
        parser.add_argument('config', help='Caminho do arquivo de configuração')

    def handle(self, *args, **options):
        try:
            configuracao = validar_configuracao(carregar_configuracao(options['config']))
        except ErroConfiguracao as erro:
            for campo, mensagens in sorted(erro.erros.items()):
                for mensagem in mensagens:
                    self.stdout.write(f'{campo}: {mensagem}')
            raise CommandError(erro.mensagem, returncode=2)

        self.stdout.write(
            self.style.SUCCESS(
                f"Configuração válida: {configuracao['nome']} "
                f"({len(configuracao['experimentos'])} experimento(s))"
            )
        )
        for experimento in configuracao['experimentos']:
            modelo = (experimento.get('modelo') or configuracao.get('modelo'))['tipo']
            self.stdout.write(f"- {experimento['nome']}: {experimento['tipo']} em {modelo}")
