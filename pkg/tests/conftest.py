"""Shared fixtures: the two-group drifting benchmark used by the predictor
ordering checks, in both programmatic and CLI-config form."""

import datetime as dt

import pytest

from dos_slotting.records import DosSpec, GeneratorConfig, GroupSpec

BENCHMARK_SEED = 5

BENCHMARK_JSON = {
    "seed": BENCHMARK_SEED,
    "generator": {
        "groups": [
            {
                "name": "chicken",
                "dos": {"kind": "lognormal", "mu": 1.8, "sigma": 0.5},
                "description_words": ["ckn", "wing", "frozen", "club", "pack"],
            },
            {
                "name": "dairy",
                "dos": {"kind": "lognormal", "mu": 0.6, "sigma": 0.3},
                "description_words": ["milk", "cream", "cheese", "block"],
            },
        ],
        "start": "2017-01-01",
        "end": "2017-09-01",
        "shipments_per_day": 8,
        "drift_mu_per_year": 0.9,
    },
}

BENCHMARK_SPLIT_JSON = {
    "split": {
        "train_exit_cutoff": "2017-06-30",
        "test_window": ["2017-06-30", "2017-07-30"],
        "extended_window": ["2017-07-30", "2017-10-30"],
    }
}

BENCHMARK_CUTOFF = dt.date(2017, 6, 30)
BENCHMARK_TEST_WINDOW = (dt.date(2017, 6, 30), dt.date(2017, 7, 30))
BENCHMARK_EXTENDED_WINDOW = (dt.date(2017, 7, 30), dt.date(2017, 10, 30))


def benchmark_generator_config() -> GeneratorConfig:
    gen = BENCHMARK_JSON["generator"]
    return GeneratorConfig(
        groups=tuple(
            GroupSpec(
                name=g["name"],
                dos=DosSpec(**g["dos"]),
                description_words=tuple(g["description_words"]),
            )
            for g in gen["groups"]
        ),
        start=dt.date.fromisoformat(gen["start"]),
        end=dt.date.fromisoformat(gen["end"]),
        shipments_per_day=gen["shipments_per_day"],
        drift_mu_per_year=gen["drift_mu_per_year"],
    )


@pytest.fixture(scope="session")
def benchmark_split():
    from dos_slotting.records import group_shipments, split_dataset, synthesize_records

    shipments = group_shipments(
        synthesize_records(benchmark_generator_config(), BENCHMARK_SEED)
    )
    return split_dataset(
        shipments, BENCHMARK_CUTOFF, BENCHMARK_TEST_WINDOW, BENCHMARK_EXTENDED_WINDOW
    )
