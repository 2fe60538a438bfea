"""Built-in vocabulary for synthetic registers: places, names, degrees, schools.

School names carry a hand-assigned true type; the pipeline's classifier is
checked against these annotations, so they must not be derived from it.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from itertools import count

from ..normalise.rules import (PRIVATE_RELIGIOUS, PRIVATE_SECULAR, STATE_NATIONAL,
                               STATE_PROVINCIAL, UNKNOWN)


@dataclass(frozen=True)
class Locality:
    name: str
    weight: int
    abbreviations: tuple[str, ...] = ()


@dataclass(frozen=True)
class Province:
    name: str
    localities: tuple[Locality, ...]
    abbreviations: tuple[str, ...] = ()


@dataclass(frozen=True)
class School:
    name: str
    true_type: str
    generic: bool = False


COUNTRY = "Argentina"
COUNTRY_VARIANTS = ("ARGENTINA", "argentina", "Arg.", "Rep. Argentina", "ARGENTINA ")

PROVINCES = (
    Province("Tucumán", (
        Locality("San Miguel de Tucumán", 50, ("S.M. de Tucumán",)),
        Locality("Yerba Buena", 10),
        Locality("Tafí Viejo", 8),
        Locality("Banda del Río Salí", 6),
        Locality("Concepción", 6),
        Locality("Monteros", 5),
        Locality("Famaillá", 4),
        Locality("Aguilares", 4),
        Locality("Lules", 4),
        Locality("Simoca", 3),
    ), ("Tuc.",)),
    Province("Salta", (
        Locality("Salta", 60),
        Locality("San Ramón de la Nueva Orán", 15),
        Locality("Metán", 13),
        Locality("Tartagal", 12),
    )),
    Province("Santiago del Estero", (
        Locality("Santiago del Estero", 55, ("Sgo. del Estero",)),
        Locality("La Banda", 25),
        Locality("Termas de Río Hondo", 20),
    ), ("Sgo. del Estero",)),
    Province("Jujuy", (
        Locality("San Salvador de Jujuy", 60, ("S.S. de Jujuy",)),
        Locality("Palpalá", 20),
        Locality("Libertador General San Martín", 20),
    )),
    Province("Catamarca", (
        Locality("San Fernando del Valle de Catamarca", 70),
        Locality("Andalgalá", 15),
        Locality("Belén", 15),
    )),
    Province("Buenos Aires", (
        Locality("La Plata", 40),
        Locality("Mar del Plata", 30),
        Locality("Bahía Blanca", 30),
    ), ("Bs. As.", "Pcia. de Buenos Aires")),
    Province("Córdoba", (
        Locality("Córdoba", 60),
        Locality("Río Cuarto", 20),
        Locality("Villa María", 20),
    ), ("Cba.",)),
    Province("La Rioja", (
        Locality("La Rioja", 70),
        Locality("Chilecito", 30),
    )),
    Province("Chaco", (
        Locality("Resistencia", 70),
        Locality("Presidencia Roque Sáenz Peña", 30),
    )),
)

PROVINCE_BY_NAME = {p.name: p for p in PROVINCES}

DEGREES = ("CIVIL", "MECANICA", "ELECTRICA", "QUIMICA", "INDUSTRIAL", "COMPUTACION")

SURNAMES = (
    "Acosta", "Aguirre", "Albornoz", "Alvarado", "Álvarez", "Aráoz", "Arce", "Ávila",
    "Barrionuevo", "Benítez", "Bustos", "Cabrera", "Campos", "Cano", "Carrizo", "Castillo",
    "Castro", "Chávez", "Coronel", "Córdoba", "Correa", "Costilla", "Cruz", "Díaz",
    "Domínguez", "Escobar", "Espinosa", "Fernández", "Figueroa", "Flores", "Frías", "Gallo",
    "Giménez", "Godoy", "Gómez", "González", "Guerrero", "Gutiérrez", "Heredia", "Herrera",
    "Ibáñez", "Juárez", "Ledesma", "Leiva", "López", "Lucero", "Luna", "Maldonado",
    "Medina", "Mendoza", "Molina", "Montenegro", "Morales", "Moreno", "Muñoz", "Navarro",
    "Nieva", "Núñez", "Ojeda", "Olea", "Ortiz", "Paz", "Peralta", "Pereyra",
    "Pérez", "Ponce", "Quiroga", "Ramírez", "Reynoso", "Ríos", "Robles", "Rodríguez",
    "Rojas", "Romano", "Romero", "Ruiz", "Salazar", "Sánchez", "Sosa", "Soria",
    "Suárez", "Tapia", "Toledo", "Torres", "Trejo", "Valdez", "Vargas", "Vega",
    "Vera", "Villagra", "Villalba", "Zamora", "Zelaya", "Zerda",
)

GIVEN = {
    "F": ("Ana", "Andrea", "Beatriz", "Carla", "Carolina", "Cecilia", "Claudia", "Daniela",
          "Elena", "Eugenia", "Fabiana", "Florencia", "Gabriela", "Graciela", "Inés", "Julia",
          "Laura", "Liliana", "Lorena", "Lucía", "Marcela", "María", "Mariana", "Marta",
          "Micaela", "Mónica", "Natalia", "Noelia", "Paula", "Romina", "Silvia", "Sofía",
          "Soledad", "Susana", "Valeria", "Verónica", "Victoria", "Ximena", "Yanina", "Zulema"),
    "M": ("Agustín", "Alberto", "Alejandro", "Andrés", "Ariel", "Carlos", "Claudio", "Cristian",
          "Daniel", "Diego", "Eduardo", "Emilio", "Ernesto", "Esteban", "Facundo", "Federico",
          "Fernando", "Gabriel", "Gustavo", "Héctor", "Hugo", "Ignacio", "Javier", "Jorge",
          "Julián", "Leandro", "Lucas", "Luis", "Marcelo", "Martín", "Matías", "Miguel",
          "Nicolás", "Omar", "Pablo", "Ramiro", "Raúl", "Ricardo", "Rodrigo", "Sergio"),
}

CIVIL_STATUS = ("S", "S", "S", "S", "C", "SOLTERO", "CASADO")

# Free-text notes that never contain a school-type pattern or a school name.
PLAIN_NOTES = (
    "sin observaciones", "legajo incompleto", "documentacion pendiente", "reincorporado",
    "equivalencias en tramite", "cambio de plan", "constancia de domicilio adeudada",
    "", "", "", "nan",
)

CLUE_NOTE_TEMPLATES = ("egresado {school}", "viene de {school}", "titulo secundario: {school}")

# School name pieces. Heroes and saints avoid every rule token except the
# intended one ("San Martín" would read as religious, so it is absent).
_HEROES = (
    "Belgrano", "Sarmiento", "Moreno", "Alberdi", "Rivadavia", "Mitre", "Avellaneda",
    "Pellegrini", "Echeverría", "Lugones", "Güemes", "Urquiza", "Dorrego", "Laprida",
    "Pueyrredón", "Lamadrid", "Alvear", "Lavalle", "Brown", "Saavedra", "Castelli",
    "Larrea", "Azcuénaga", "Matheu", "Monteagudo", "Frías", "Storni", "Houssay",
    "Leloir", "Ameghino", "Holmberg", "Piedrabuena", "Mosconi", "Balseiro", "Favaloro",
)
_SAINTS = (
    "San José", "Santa Rosa", "Santo Tomás de Aquino", "San Francisco", "Santa Catalina",
    "San Agustín", "Santa Ana", "San Pablo", "Santa Teresa", "San Cayetano", "Santa Clara",
    "San Roque", "Santo Domingo", "San Ignacio", "Santa Inés", "San Vicente de Paul",
    "Santa Lucía", "San Luis Gonzaga", "San Benito", "Santa Mónica",
)

# Names shared by campuses in several localities (ambiguous without the locality).
GENERIC_SCHOOLS = (
    School("Escuela Normal", STATE_NATIONAL, True),
    School("Colegio Nacional", STATE_NATIONAL, True),
    School("Escuela Nacional de Comercio", STATE_NATIONAL, True),
    School("Escuela Técnica N° 1", STATE_PROVINCIAL, True),
    School("Colegio del Sagrado Corazón", PRIVATE_RELIGIOUS, True),
)

_NUMBERED = {
    STATE_NATIONAL: ("ENET N° {k}", "CENS N° {k}"),
    STATE_PROVINCIAL: ("E.P.E.T. N° {k}", "Escuela Provincial N° {k}", "Escuela de Educación Técnica N° {k}"),
    UNKNOWN: ("Escuela Media N° {k}", "Escuela Agrotécnica N° {k}"),
}
_RELIGIOUS_NAMED = (
    "Colegio {saint}", "Instituto {saint}", "Escuela Parroquial {saint}", "Colegio Parroquial {saint}",
)
_RELIGIOUS_FIXED = (
    "Colegio La Salle", "Colegio Nuestra Señora del Valle", "Colegio Cristo Rey",
    "Colegio María Auxiliadora", "Escuela Parroquial Santa Cruz", "Colegio Nuestra Señora de Fátima",
)
_SECULAR_NAMED = ("Instituto {hero}", "Academia {hero}", "Colegio Bilingüe {hero}", "Colegio Privado {hero}")
_UNKNOWN_NAMED = ("Bachillerato Humanista {hero}", "Liceo {hero}", "Gymnasium {hero}")

BIG_LOCALITY_WEIGHT = 50


def strip_accents(s: str) -> str:
    return "".join(c for c in unicodedata.normalize("NFD", s) if not unicodedata.combining(c))


def spelling_variants(label: str, abbreviations=()) -> tuple[str, ...]:
    """Alternative spellings seen in legacy forms, the canonical spelling excluded."""
    out = [label.upper(), strip_accents(label), strip_accents(label).upper(), *abbreviations]
    return tuple(dict.fromkeys(v for v in out if v != label))


def school_variants(name: str) -> tuple[str, ...]:
    """Spellings that normalise to the same matching key as ``name``."""
    out = [name.upper(), strip_accents(name)]
    if name.startswith("Escuela "):
        out.append("Esc. " + name[len("Escuela "):])
    return tuple(dict.fromkeys(v for v in out if v != name))


def _named(templates, fillers, key: str):
    for filler in fillers:
        for t in templates:
            yield t.format(**{key: filler})


def build_school_catalogue() -> dict[tuple[str, str], tuple[School, ...]]:
    """Schools per (province, locality), built without randomness.

    Every locality gets the generic "Escuela Normal" and at least one unique
    school of each type; large localities get more of everything.
    """
    numbers = count(1)
    religious = iter(list(_RELIGIOUS_FIXED) + list(_named(_RELIGIOUS_NAMED, _SAINTS, "saint")))
    secular = iter(_named(_SECULAR_NAMED, _HEROES, "hero"))
    unknown = iter(_named(_UNKNOWN_NAMED, _HEROES, "hero"))
    catalogue: dict[tuple[str, str], tuple[School, ...]] = {}
    for prov in PROVINCES:
        for loc in prov.localities:
            big = loc.weight >= BIG_LOCALITY_WEIGHT
            per_type = 3 if big else 1
            schools = [GENERIC_SCHOOLS[0]]
            if big:
                schools += GENERIC_SCHOOLS[1:]
            elif loc.weight >= 20:
                schools += GENERIC_SCHOOLS[1:2]
            for _ in range(per_type):
                for target, templates in _NUMBERED.items():
                    if target == UNKNOWN:
                        continue
                    for t in templates[:2]:
                        schools.append(School(t.format(k=next(numbers)), target))
                schools.append(School(next(religious), PRIVATE_RELIGIOUS))
                schools.append(School(next(secular), PRIVATE_SECULAR))
            if big:
                schools.append(School(_NUMBERED[STATE_PROVINCIAL][2].format(k=next(numbers)), STATE_PROVINCIAL))
            schools.append(School(_NUMBERED[UNKNOWN][0].format(k=next(numbers)), UNKNOWN))
            schools.append(School(next(unknown), UNKNOWN))
            catalogue[(prov.name, loc.name)] = tuple(schools)
    return catalogue
