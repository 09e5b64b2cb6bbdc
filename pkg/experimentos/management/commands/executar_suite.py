import json

from django.core.management.base import CommandError

from core.excecoes import ErroConfiguracao
from experimentos.services import executar_configuracao, verificar_determinismo
from experimentos.suites import SUITES, obter_suite

from ._comum import ComandoExperimento


class Command(ComandoExperimento):
    """Executa uma suíte nomeada de aceitação"""

    help = 'Executa uma suíte de aceitação (use --listar para ver as disponíveis)'

    def add_arguments(self, parser):
        parser.add_argument('nome', nargs='?', help='Nome da suíte')
        super().add_arguments(parser)

        parser.add_argument(
            '--listar',
            action='store_true',
            help='Lista as suítes disponíveis',
        )

        parser.add_argument(
            '--verificar-determinismo',
            action='store_true',
            help='Executa duas vezes com 1 thread e uma com --threads e compara os relatórios',
        )

        parser.add_argument(
            '--mostrar-config',
            action='store_true',
            help='Imprime a configuração da suíte sem executá-la',
        )

    def handle(self, *args, **options):
        if options['listar'] or not options['nome']:
            for nome in SUITES:
                self.stdout.write(nome)
            return

        try:
            configuracao = obter_suite(options['nome'])
        except KeyError:
            raise CommandError(
                f"Suíte desconhecida: {options['nome']}. Opções válidas: {', '.join(SUITES)}", returncode=2
            )

        if options['mostrar_config']:
            self.stdout.write(json.dumps(configuracao, indent=2, ensure_ascii=False))
            return

        try:
            if options['verificar_determinismo']:
                self._verificar_determinismo(configuracao, options)
                return
            manifesto = executar_configuracao(
                configuracao, threads=options['threads'], semente=options['seed'], saida=options['out'],
            )
        except ErroConfiguracao as erro:
            self.escrever_erros_configuracao(erro)
            raise CommandError('Configuração da suíte inválida', returncode=2)

        self.relatar(manifesto, options['strict'])

    def _verificar_determinismo(self, configuracao, options):
        if options['seed'] is not None:
            configuracao = dict(configuracao, semente=options['seed'])
        diretorio = options['out'] or f"determinismo_{configuracao['nome']}"
        resultado = verificar_determinismo(configuracao, diretorio, threads=options['threads'] or 4)
        for rotulo in ('repeticao', 'threads'):
            for arquivo in resultado[rotulo]:
                self.stdout.write(self.style.ERROR(f'{rotulo}: {arquivo} diverge'))
        if not resultado['deterministico']:
            raise CommandError('Relatórios divergentes entre execuções', returncode=1)
        self.stdout.write(self.style.SUCCESS('Relatórios idênticos nas três execuções'))
