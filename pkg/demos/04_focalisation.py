"""
Entity bundles: a type plus the salient reading
===============================================

An organisation name can point at the institution, at its diplomatic role or
at its premises. The bundle keeps the entity's type and adds the reading in
focus. Here the schema declares org readings and two hand-written rules pick
them from the context.
"""

from focalner import default_lexicons
from focalner.corpus import load_schema, parse_inline
from focalner.induction import parse_rules
from focalner.resources import data_path
from focalner.tagger import Tagger

schema = load_schema(data_path("schema_org.txt"))
rules = parse_rules(
    "org\tVCLASS_GOV:refusal\tdipl\t0.001\t0.95\t20\n"
    "org\tTRIG:loc_prep:left\tbldg\t0.002\t0.9\t14\n"
)
tagger = Tagger(default_lexicons(), rules, schema=schema)

for text in [
    "L' ONU n' acceptera pas une telle décision .",
    "Les informations sont présentées ce soir depuis l' ONU .",
    "L' ONU compte de nombreux membres .",
    "Monsieur Dupont parle à la presse .",
]:
    _, bundles = tagger.tag(parse_inline(text, schema))
    print(text)
    for b in bundles:
        print("   ", b.render())
