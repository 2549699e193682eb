"""Assemble a pipeline configuration from lingware paths.

The package ships a small French demo loadout (dictionary, derivation
tables, variable schema, rule packs, morph pack, profiles) under
``deconv/data``; ``demo_config`` wires it up in one call.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .errors import LingwareError
from .inventories import load_inventories
from .lexicon import AssocCounts, Lexicon, load_profiles
from .morphgen import MorphRulePack
from .pipeline import DeconvConfig
from .rewrite.phases import RulePacks
from .tables import IncompatTable, RestrictionVarTable


def data_dir() -> Path:
    return Path(resources.files("deconv") / "data")


def load_config(
    dict_path: str | Path,
    units_path: str | Path,
    schema_path: str | Path,
    ts_path: str | Path,
    gs1_path: str | Path,
    gs2_path: str | Path,
    morph_dir: str | Path,
    profiles_path: str | Path,
    inventories_path: str | Path,
    restriction_vars_path: str | Path,
    incompat_path: str | Path,
    profile_name: str = "default",
    counts_path: str | Path | None = None,
    seed: int = 0,
    mode: str = "automatic",
    style_prefs: dict | None = None,
    dict_id: str = "demo",
) -> DeconvConfig:
    lexicon = Lexicon()
    lexicon.load_dictionary(dict_path, dict_id)
    lexicon.load_units(units_path)
    lexicon.check_units()
    packs = RulePacks.load(schema_path, ts_path, gs1_path, gs2_path)
    morph = MorphRulePack.load(morph_dir)
    missing = {
        d.paradigm for unit in lexicon.units.values() for d in unit.derivations
    } - morph.paradigms()
    if missing:
        raise LingwareError(f"derivation paradigms unknown to the morph pack: {sorted(missing)}")
    profiles = load_profiles(profiles_path)
    if profile_name not in profiles:
        raise LingwareError(f"no profile {profile_name!r} in {profiles_path}")
    return DeconvConfig(
        lexicon=lexicon,
        profile=profiles[profile_name],
        counts=AssocCounts(counts_path),
        packs=packs,
        morph=morph,
        inventories=load_inventories(inventories_path),
        restriction_vars=RestrictionVarTable.load(restriction_vars_path),
        incompat=IncompatTable.load(incompat_path),
        seed=seed,
        mode=mode,
        style_prefs=style_prefs,
    )


def demo_config(
    counts_path: str | Path | None = None,
    seed: int = 0,
    profile_name: str = "default",
    mode: str = "automatic",
    style_prefs: dict | None = None,
) -> DeconvConfig:
    d = data_dir()
    return load_config(
        dict_path=d / "uws.tsv",
        units_path=d / "units.tsv",
        schema_path=d / "schema.dv",
        ts_path=d / "ts.rules",
        gs1_path=d / "gs1.rules",
        gs2_path=d / "gs2.rules",
        morph_dir=d / "morph",
        profiles_path=d / "profiles.cfg",
        inventories_path=d / "inventories.cfg",
        restriction_vars_path=d / "restriction_vars.tsv",
        incompat_path=d / "incompat.tsv",
        profile_name=profile_name,
        counts_path=counts_path,
        seed=seed,
        mode=mode,
        style_prefs=style_prefs,
    )
