from django.core.management.base import BaseCommand

from core.relatorios import dumps_json
from variedades.registro import listar_modelos


class Command(BaseCommand):
    """Lista os modelos registrados com suas bandeiras"""

    help = 'Lista os modelos do registro, com hipóteses declaradas e oráculos disponíveis'

    def add_arguments(self, parser):
        parser.add_argument(
            '--json',
            action='store_true',
            help='Emite o catálogo completo em JSON',
        )

    def handle(self, *args, **options):
        catalogo = listar_modelos()
        if options['json']:
            self.stdout.write(dumps_json(catalogo), ending='')
            return

        for entrada in catalogo:
            instancia = entrada['instancia']
            self.stdout.write(self.style.SUCCESS(f"{entrada['tipo']}: {entrada['descricao']}"))
            bandeiras = [nome for nome, valor in instancia['bandeiras'].items() if valor is True]
            self.stdout.write(f"    bandeiras: {', '.join(bandeiras) or '-'}")
            self.stdout.write(f"    oráculos: {', '.join(instancia['oraculos']) or '-'}")
