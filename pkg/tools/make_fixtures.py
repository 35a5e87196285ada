#!/usr/bin/env python3
"""Regenerate the bundled terminology and corpus fixtures.

The core block is handcrafted (it anchors the replay script and the unit
tests); the filler block is generated so the terminology reaches catalog
scale (~300 entries) with a consistent broader/narrower hierarchy.
Run from the repository root:  python3 tools/make_fixtures.py
"""

from __future__ import annotations

from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "src" / "querydialog" / "data"

CORE_TERMS = """\
# Terminology fixture: controlled vocabulary with synonym lists, an acyclic
# broader/narrower hierarchy and keyword-qualifier associations.
# Record syntax:
#   term <id> kind=<keyword|qualifier|metaterm|resource-type> label="..."
#        [syn="a,b"] [broader=<id,...>] [narrower=<id,...>] [qualifiers=<id,...>]
# Id suffixes: .mc keyword, .qu qualifier, .mt metaterm, .tr resource type.

# -- qualifiers ---------------------------------------------------------------
term therapeutique.qu kind=qualifier label="thérapeutique" syn="prise en charge" narrower=traitement-medicamenteux.qu,chirurgie.qu,dietetique.qu
term traitement-medicamenteux.qu kind=qualifier label="traitement médicamenteux" syn="chimiothérapie" broader=therapeutique.qu
term chirurgie.qu kind=qualifier label="chirurgie" broader=therapeutique.qu
term dietetique.qu kind=qualifier label="diétothérapie" broader=therapeutique.qu
term diagnostic.qu kind=qualifier label="diagnostic" syn="dépistage"
term prevention.qu kind=qualifier label="prévention et contrôle" syn="prévention"
term complications.qu kind=qualifier label="complications"
term epidemiologie.qu kind=qualifier label="épidémiologie"
term etiologie.qu kind=qualifier label="étiologie" syn="causes"
term psychologie.qu kind=qualifier label="psychologie"

# -- metaterms ----------------------------------------------------------------
term rhumatologie.mt kind=metaterm label="rhumatologie"
term dermatologie.mt kind=metaterm label="dermatologie"
term neurologie.mt kind=metaterm label="neurologie"
term cardiologie.mt kind=metaterm label="cardiologie"
term infectiologie.mt kind=metaterm label="infectiologie" syn="maladies infectieuses"
term psychiatrie.mt kind=metaterm label="psychiatrie"
term nutrition.mt kind=metaterm label="nutrition"
term pediatrie.mt kind=metaterm label="pédiatrie"
term ophtalmologie.mt kind=metaterm label="ophtalmologie"
term endocrinologie.mt kind=metaterm label="endocrinologie"
term pneumologie.mt kind=metaterm label="pneumologie"
term gastroenterologie.mt kind=metaterm label="gastroentérologie"

# -- resource types -------------------------------------------------------------
term patient.tr kind=resource-type label="patient" syn="grand public,document pour les patients"
term medecin.tr kind=resource-type label="médecin" syn="professionnel de santé"
term recommandations.tr kind=resource-type label="recommandations"
term enseignement.tr kind=resource-type label="enseignement" syn="cours"

# -- keywords: malaria cluster (replay anchor) ---------------------------------
term paludisme.mc kind=keyword label="paludisme" syn="malaria" narrower=paludisme-falciparum.mc,neuropaludisme.mc qualifiers=therapeutique.qu,traitement-medicamenteux.qu,diagnostic.qu,prevention.qu
term paludisme-falciparum.mc kind=keyword label="paludisme à plasmodium falciparum" broader=paludisme.mc qualifiers=therapeutique.qu,traitement-medicamenteux.qu
term neuropaludisme.mc kind=keyword label="neuropaludisme" broader=paludisme.mc qualifiers=therapeutique.qu,complications.qu
term therapeutique.mc kind=keyword label="thérapeutique" syn="traitement" narrower=chimiotherapie.mc qualifiers=etiologie.qu
term chimiotherapie.mc kind=keyword label="chimiothérapie anticancéreuse" broader=therapeutique.mc qualifiers=complications.qu

# -- keywords: joints cluster ----------------------------------------------------
term arthralgie.mc kind=keyword label="arthralgie" syn="douleurs articulaires,maladies des articulations" narrower=gonarthrose.mc,polyarthrite.mc qualifiers=therapeutique.qu,diagnostic.qu,etiologie.qu
term gonarthrose.mc kind=keyword label="gonarthrose" broader=arthralgie.mc qualifiers=therapeutique.qu,chirurgie.qu
term polyarthrite.mc kind=keyword label="polyarthrite rhumatoïde" broader=arthralgie.mc qualifiers=therapeutique.qu,traitement-medicamenteux.qu
term tendinite.mc kind=keyword label="tendinite" qualifiers=therapeutique.qu,diagnostic.qu
term articulations.mc kind=keyword label="articulations" syn="articulation" qualifiers=diagnostic.qu

# -- keywords: feeding cluster -----------------------------------------------------
term troubles-alimentaires.mc kind=keyword label="troubles de l'alimentation" syn="problèmes avec la nourriture" narrower=anorexie.mc,boulimie.mc qualifiers=therapeutique.qu,psychologie.qu
term anorexie.mc kind=keyword label="anorexie" syn="anorexie mentale" broader=troubles-alimentaires.mc qualifiers=therapeutique.qu,psychologie.qu
term boulimie.mc kind=keyword label="boulimie" broader=troubles-alimentaires.mc qualifiers=therapeutique.qu,psychologie.qu

# -- keywords: anxiety and sleep ------------------------------------------------------
term troubles-anxieux.mc kind=keyword label="troubles anxieux" syn="crises d'angoisse,angoisse" qualifiers=therapeutique.qu,psychologie.qu,traitement-medicamenteux.qu
term troubles-sommeil.mc kind=keyword label="troubles du sommeil" syn="troubles de sommeil" narrower=parasomnie.mc,insomnie.mc qualifiers=therapeutique.qu,etiologie.qu
term parasomnie.mc kind=keyword label="parasomnie" broader=troubles-sommeil.mc qualifiers=diagnostic.qu
term insomnie.mc kind=keyword label="insomnie" broader=troubles-sommeil.mc qualifiers=therapeutique.qu

# -- keywords: misc corpus anchors ------------------------------------------------------
term epilepsie.mc kind=keyword label="épilepsie" syn="épileptique" qualifiers=therapeutique.qu,traitement-medicamenteux.qu,complications.qu
term grossesse.mc kind=keyword label="grossesse" syn="femme enceinte" qualifiers=complications.qu,prevention.qu
term cholesterol.mc kind=keyword label="cholestérol" narrower=cholesterol-hdl.mc,cholesterol-alimentaire.mc qualifiers=therapeutique.qu,dietetique.qu,diagnostic.qu
term cholesterol-hdl.mc kind=keyword label="cholestérol hdl" broader=cholesterol.mc qualifiers=diagnostic.qu
term cholesterol-alimentaire.mc kind=keyword label="cholestérol alimentaire" broader=cholesterol.mc qualifiers=dietetique.qu
term dons-organes.mc kind=keyword label="don d'organes" syn="donneur d'organes,dons d'organes" qualifiers=etiologie.qu
term calvitie.mc kind=keyword label="calvitie" syn="chauve,perte des cheveux" qualifiers=therapeutique.qu,etiologie.qu
term cheveu.mc kind=keyword label="cheveu" syn="cheveux" qualifiers=etiologie.qu
term glaucome.mc kind=keyword label="glaucome" qualifiers=therapeutique.qu,chirurgie.qu,diagnostic.qu
term poux.mc kind=keyword label="poux" syn="pédiculose" qualifiers=therapeutique.qu,prevention.qu
"""

CORE_DOCS = """\
# Document corpus fixture.  Engineered so that
#   {motcle paludisme, qualificatif thérapeutique}                    -> 11 documents
#   {motcles paludisme+thérapeutique, qualificatif traitement
#    médicamenteux, type_ressource patient}                           -> 1 document (PCIME)
# Record syntax:
#   doc <id> title="..." [desc="..."] [type=<id>] [audience=patient|medecin]
#       [metaterms=<id,...>] [index="kw[:qu];kw[:qu];..."]

doc p01 title="Traitement du paludisme simple" desc="protocole de traitement du paludisme non compliqué" type=recommandations.tr audience=medecin metaterms=infectiologie.mt index="paludisme.mc:therapeutique.qu"
doc p02 title="Prise en charge du paludisme grave" desc="conduite à tenir devant un paludisme grave" type=recommandations.tr audience=medecin metaterms=infectiologie.mt index="paludisme.mc:therapeutique.qu;paludisme.mc:complications.qu"
doc p03 title="Paludisme : guide thérapeutique" desc="guide de thérapeutique antipaludique" type=enseignement.tr audience=medecin metaterms=infectiologie.mt index="paludisme.mc:therapeutique.qu"
doc p04 title="Soigner le paludisme chez l'adulte" desc="options de traitement chez l'adulte" type=recommandations.tr audience=medecin metaterms=infectiologie.mt index="paludisme.mc:therapeutique.qu"
doc p05 title="Paludisme : traitement et prévention" desc="traitement curatif et prévention du paludisme" type=patient.tr audience=patient metaterms=infectiologie.mt index="paludisme.mc:therapeutique.qu;paludisme.mc:prevention.qu"
doc p06 title="Traitement du paludisme à plasmodium falciparum" desc="schémas thérapeutiques du paludisme à falciparum" type=recommandations.tr audience=medecin metaterms=infectiologie.mt index="paludisme-falciparum.mc:therapeutique.qu"
doc p07 title="Neuropaludisme : prise en charge" desc="prise en charge du neuropaludisme" type=enseignement.tr audience=medecin metaterms=infectiologie.mt,neurologie.mt index="neuropaludisme.mc:therapeutique.qu"
doc p08 title="Se soigner du paludisme en voyage" desc="conseils de traitement pour les voyageurs" type=patient.tr audience=patient metaterms=infectiologie.mt index="paludisme.mc:therapeutique.qu"
doc p09 title="Thérapeutique antipaludique moderne" desc="revue des thérapeutiques du paludisme" type=enseignement.tr audience=medecin metaterms=infectiologie.mt index="paludisme.mc:therapeutique.qu;therapeutique.mc"
doc p10 title="Médicaments antipaludiques" desc="traitement médicamenteux du paludisme" type=recommandations.tr audience=medecin metaterms=infectiologie.mt index="paludisme.mc:traitement-medicamenteux.qu;paludisme.mc:therapeutique.qu"
doc p11 title="Modèle de chapitre pour les manuels PCIME - la prise en charge intégrée des maladies de l'enfant" desc="prise en charge intégrée des enfants malades dans un petit hôpital ; 42p" type=patient.tr audience=patient metaterms=infectiologie.mt,pediatrie.mt index="paludisme.mc:therapeutique.qu;paludisme.mc:traitement-medicamenteux.qu;therapeutique.mc"
doc p12 title="Diagnostic biologique du paludisme" desc="tests diagnostiques du paludisme" type=enseignement.tr audience=medecin metaterms=infectiologie.mt index="paludisme.mc:diagnostic.qu"
doc p13 title="Épidémiologie du paludisme" desc="répartition mondiale du paludisme" type=enseignement.tr audience=medecin metaterms=infectiologie.mt index="paludisme.mc:epidemiologie.qu"

doc j01 title="Douleurs articulaires : bilan" desc="démarche diagnostique devant des arthralgies" type=recommandations.tr audience=medecin metaterms=rhumatologie.mt index="arthralgie.mc:diagnostic.qu"
doc j02 title="Gonarthrose : traitement" desc="traitements de la gonarthrose" type=recommandations.tr audience=medecin metaterms=rhumatologie.mt index="gonarthrose.mc:therapeutique.qu"
doc j03 title="Chirurgie de la gonarthrose" desc="indications chirurgicales dans la gonarthrose" type=enseignement.tr audience=medecin metaterms=rhumatologie.mt index="gonarthrose.mc:chirurgie.qu"
doc j04 title="Polyarthrite rhumatoïde : traitements de fond" desc="traitement médicamenteux de la polyarthrite" type=recommandations.tr audience=medecin metaterms=rhumatologie.mt index="polyarthrite.mc:traitement-medicamenteux.qu;polyarthrite.mc:therapeutique.qu"
doc j05 title="La tendinite expliquée aux patients" desc="comprendre et soigner une tendinite" type=patient.tr audience=patient metaterms=rhumatologie.mt index="tendinite.mc:therapeutique.qu"
doc j06 title="Tendinites du sportif" desc="diagnostic des tendinites du sportif" type=enseignement.tr audience=medecin metaterms=rhumatologie.mt index="tendinite.mc:diagnostic.qu"

doc a01 title="Anorexie mentale de l'adolescent" desc="prise en charge de l'anorexie mentale" type=recommandations.tr audience=medecin metaterms=psychiatrie.mt,nutrition.mt index="anorexie.mc:therapeutique.qu;anorexie.mc:psychologie.qu"
doc a02 title="Boulimie : approche psychologique" desc="dimension psychologique de la boulimie" type=enseignement.tr audience=medecin metaterms=psychiatrie.mt index="boulimie.mc:psychologie.qu"
doc a03 title="Troubles de l'alimentation : guide famille" desc="aider un proche souffrant de troubles alimentaires" type=patient.tr audience=patient metaterms=psychiatrie.mt,nutrition.mt index="troubles-alimentaires.mc:therapeutique.qu"

doc x01 title="Crises d'angoisse : que faire ?" desc="gérer les crises d'angoisse au quotidien" type=patient.tr audience=patient metaterms=psychiatrie.mt index="troubles-anxieux.mc:therapeutique.qu;troubles-anxieux.mc:psychologie.qu"
doc x02 title="Anxiolytiques : bon usage" desc="traitement médicamenteux des troubles anxieux" type=recommandations.tr audience=medecin metaterms=psychiatrie.mt index="troubles-anxieux.mc:traitement-medicamenteux.qu"
doc x03 title="Insomnie chronique" desc="traiter l'insomnie chronique" type=recommandations.tr audience=medecin metaterms=neurologie.mt index="insomnie.mc:therapeutique.qu"
doc x04 title="Les parasomnies de l'enfant" desc="reconnaître les parasomnies chez l'enfant" type=patient.tr audience=patient metaterms=neurologie.mt,pediatrie.mt index="parasomnie.mc:diagnostic.qu"

doc e01 title="Épilepsie et grossesse" desc="risques et suivi de la grossesse chez la femme épileptique" type=recommandations.tr audience=medecin metaterms=neurologie.mt index="epilepsie.mc:complications.qu;grossesse.mc:complications.qu"
doc e02 title="Médicaments antiépileptiques" desc="traitement médicamenteux de l'épilepsie" type=recommandations.tr audience=medecin metaterms=neurologie.mt index="epilepsie.mc:traitement-medicamenteux.qu;epilepsie.mc:therapeutique.qu"
doc e03 title="Vivre avec une épilepsie" desc="conseils pratiques pour les patients épileptiques" type=patient.tr audience=patient metaterms=neurologie.mt index="epilepsie.mc:therapeutique.qu"

doc c01 title="Cholestérol et alimentation" desc="régime et cholestérol alimentaire" type=patient.tr audience=patient metaterms=nutrition.mt,cardiologie.mt index="cholesterol-alimentaire.mc:dietetique.qu;cholesterol.mc:dietetique.qu"
doc c02 title="Comprendre le cholestérol hdl" desc="interprétation du dosage du cholestérol hdl" type=patient.tr audience=patient metaterms=cardiologie.mt index="cholesterol-hdl.mc:diagnostic.qu"
doc c03 title="Hypercholestérolémie : traitement" desc="traitement de l'excès de cholestérol" type=recommandations.tr audience=medecin metaterms=cardiologie.mt index="cholesterol.mc:therapeutique.qu"

doc m01 title="Don d'organes : les démarches" desc="démarches à accomplir pour devenir donneur d'organes" type=patient.tr audience=patient metaterms=nutrition.mt index="dons-organes.mc"
doc m02 title="Calvitie : traitements actuels" desc="options thérapeutiques de la calvitie" type=patient.tr audience=patient metaterms=dermatologie.mt index="calvitie.mc:therapeutique.qu"
doc m03 title="Glaucome : dépistage et chirurgie" desc="dépistage et traitement chirurgical du glaucome" type=recommandations.tr audience=medecin metaterms=ophtalmologie.mt index="glaucome.mc:diagnostic.qu;glaucome.mc:chirurgie.qu"
doc m04 title="Poux : prévention à l'école" desc="prévenir la pédiculose en milieu scolaire" type=patient.tr audience=patient metaterms=dermatologie.mt index="poux.mc:prevention.qu"
"""

FAMILIES = [
    ("cardio", "cardiologie.mt", ["infarctus du myocarde", "hypertension artérielle", "insuffisance cardiaque", "angor", "troubles du rythme", "péricardite"]),
    ("derm", "dermatologie.mt", ["eczéma", "psoriasis", "acné", "urticaire", "mycose cutanée", "zona"]),
    ("neuro", "neurologie.mt", ["migraine", "sclérose en plaques", "maladie de parkinson", "accident vasculaire cérébral", "névralgie", "démence"]),
    ("pneumo", "pneumologie.mt", ["asthme", "bronchite chronique", "pneumonie", "tuberculose", "apnée du sommeil", "embolie pulmonaire"]),
    ("gastro", "gastroenterologie.mt", ["ulcère gastrique", "maladie de crohn", "cirrhose", "pancréatite", "reflux gastro-oesophagien", "colite"]),
    ("endoc", "endocrinologie.mt", ["diabète", "hypothyroïdie", "hyperthyroïdie", "obésité", "ostéoporose", "goitre"]),
    ("infect", "infectiologie.mt", ["grippe", "hépatite virale", "méningite", "rougeole", "varicelle", "fièvre typhoïde"]),
    ("psych", "psychiatrie.mt", ["dépression", "schizophrénie", "troubles bipolaires", "phobie", "addiction", "stress post-traumatique"]),
    ("ped", "pediatrie.mt", ["bronchiolite", "otite", "angine", "croissance", "vaccination", "coliques du nourrisson"]),
    ("ophta", "ophtalmologie.mt", ["cataracte", "myopie", "conjonctivite", "rétinopathie", "strabisme", "kératite"]),
    ("rhum", "rhumatologie.mt", ["lombalgie", "sciatique", "goutte", "spondylarthrite", "fibromyalgie", "entorse"]),
    ("nutri", "nutrition.mt", ["dénutrition", "carence en fer", "allergie alimentaire", "surpoids", "régime sans gluten", "avitaminose"]),
]

SUBTYPES = ["de l'adulte", "de l'enfant", "forme aiguë"]
QUALS = ["therapeutique.qu", "diagnostic.qu", "prevention.qu", "etiologie.qu"]


def slugify(label: str) -> str:
    import unicodedata

    folded = unicodedata.normalize("NFD", label.lower())
    folded = "".join(ch for ch in folded if not unicodedata.combining(ch))
    return "-".join("".join(ch if ch.isalnum() else " " for ch in folded).split())


def filler_terms() -> list:
    lines = ["", "# -- generated filler keywords (catalog scale) --"]
    for prefix, _mt, labels in FAMILIES:
        for label in labels:
            root = f"{slugify(label)}.mc"
            children = [f"{slugify(label)}-{slugify(sub)}.mc" for sub in SUBTYPES]
            quals = ",".join(QUALS[: 2 + (hash(label) % 3)])
            lines.append(
                f'term {root} kind=keyword label="{label}" narrower={",".join(children)} qualifiers={quals}'
            )
            for child, sub in zip(children, SUBTYPES):
                lines.append(
                    f'term {child} kind=keyword label="{label} {sub}" broader={root} qualifiers={QUALS[0]}'
                )
    return lines


def filler_docs() -> list:
    lines = ["", "# -- generated filler documents --"]
    i = 0
    for prefix, mt, labels in FAMILIES:
        for label in labels[:2]:
            i += 1
            root = f"{slugify(label)}.mc"
            lines.append(
                f'doc f{i:02d} title="{label.capitalize()} : traitement" '
                f'desc="prise en charge : {label}" type=recommandations.tr audience=medecin '
                f'metaterms={mt} index="{root}:therapeutique.qu"'
            )
    return lines


def main() -> None:
    terminology = CORE_TERMS + "\n".join(filler_terms()) + "\n"
    corpus = CORE_DOCS + "\n".join(filler_docs()) + "\n"
    (DATA / "terminology.txt").write_text(terminology, encoding="utf-8")
    (DATA / "corpus.txt").write_text(corpus, encoding="utf-8")
    n_terms = sum(1 for l in terminology.splitlines() if l.startswith("term "))
    n_docs = sum(1 for l in corpus.splitlines() if l.startswith("doc "))
    print(f"terminology.txt: {n_terms} entries")
    print(f"corpus.txt: {n_docs} documents")


if __name__ == "__main__":
    main()
