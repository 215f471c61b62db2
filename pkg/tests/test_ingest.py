import random
from textwrap import dedent

import numpy as np
import pytest

from workforecast.errors import (
    EmptyIntersection,
    GapInYears,
    MalformedRow,
    NegativeCount,
    OverlappingAgeBands,
    OverlappingSpells,
)
from workforecast.ingest import (
    parse_programme_records,
    parse_regional_series,
    write_regional_series,
)

from helpers import random_regional_series


def _write(path, text):
    path.write_text(dedent(text).lstrip("\n"), encoding="utf-8")
    return path


def _stat_files(tmp_path, employment, unemployment, population):
    return (
        _write(tmp_path / "employment.csv", employment),
        _write(tmp_path / "unemployment.csv", unemployment),
        _write(tmp_path / "population.csv", population),
    )


def _full_period_files(tmp_path, years=range(2000, 2021), region="R1"):
    employment = "region,year,employed\n" + "".join(f"{region},{y},{100000 + 100 * y}\n" for y in years)
    unemployment = "region,year,unemployed_6m\n" + "".join(f"{region},{y},{5000 + y}\n" for y in years)
    population = "region,year,age_lo,age_hi,persons\n" + "".join(
        f"{region},{y},0,15,20000\n{region},{y},16,64,90000\n{region},{y},65,90,18000\n" for y in years
    )
    return _stat_files(tmp_path, employment, unemployment, population)


class TestParseRegionalSeries:
    def test_well_formed_full_period(self, tmp_path):
        series = parse_regional_series(*_full_period_files(tmp_path))
        assert set(series) == {"R1"}
        assert series["R1"].years == tuple(range(2000, 2021))
        assert len(series["R1"].years) == 21
        assert series["R1"].employment[2005] == 100000 + 100 * 2005
        assert series["R1"].population[2010][(16, 64)] == 90000

    def test_years_restricted_to_intersection(self, tmp_path):
        employment = "region,year,employed\n" + "".join(f"R1,{y},100000\n" for y in range(2000, 2021))
        unemployment = "region,year,unemployed_6m\n" + "".join(f"R1,{y},5000\n" for y in range(2000, 2021))
        population = "region,year,age_lo,age_hi,persons\n" + "".join(
            f"R1,{y},16,64,90000\n" for y in range(2011, 2021)
        )
        series = parse_regional_series(*_stat_files(tmp_path, employment, unemployment, population))
        assert series["R1"].years == tuple(range(2011, 2021))
        assert set(series["R1"].employment) == set(range(2011, 2021))

    def test_negative_count_names_the_row(self, tmp_path):
        employment = """
        region,year,employed
        R1,2000,100
        R1,2001,-5
        """
        unemployment = "region,year,unemployed_6m\nR1,2000,5\nR1,2001,5\n"
        population = "region,year,age_lo,age_hi,persons\nR1,2000,16,64,90\nR1,2001,16,64,90\n"
        files = _stat_files(tmp_path, employment, unemployment, population)
        with pytest.raises(NegativeCount) as excinfo:
            parse_regional_series(*files)
        assert excinfo.value.file.endswith("employment.csv")
        assert excinfo.value.line == 3
        assert "-5" in str(excinfo.value)

    def test_gap_in_common_years(self, tmp_path):
        years = [2010, 2011, 2012, 2014, 2015]  # no 2013
        employment = "region,year,employed\n" + "".join(f"R1,{y},100\n" for y in years)
        unemployment = "region,year,unemployed_6m\n" + "".join(f"R1,{y},5\n" for y in range(2010, 2016))
        population = "region,year,age_lo,age_hi,persons\n" + "".join(
            f"R1,{y},16,64,90\n" for y in range(2010, 2016)
        )
        with pytest.raises(GapInYears) as excinfo:
            parse_regional_series(*_stat_files(tmp_path, employment, unemployment, population))
        assert excinfo.value.region == "R1"
        assert excinfo.value.year == 2013

    def test_empty_intersection(self, tmp_path):
        employment = "region,year,employed\nR1,2000,100\n"
        unemployment = "region,year,unemployed_6m\nR1,2000,5\n"
        population = "region,year,age_lo,age_hi,persons\nR1,1990,16,64,90\n"
        with pytest.raises(EmptyIntersection) as excinfo:
            parse_regional_series(*_stat_files(tmp_path, employment, unemployment, population))
        assert excinfo.value.region == "R1"

    def test_fractional_count_rejected(self, tmp_path):
        employment = "region,year,employed\nR1,2000,100.5\nR1,2001,100\n"
        unemployment = "region,year,unemployed_6m\nR1,2000,5\nR1,2001,5\n"
        population = "region,year,age_lo,age_hi,persons\nR1,2000,16,64,90\nR1,2001,16,64,90\n"
        with pytest.raises(MalformedRow) as excinfo:
            parse_regional_series(*_stat_files(tmp_path, employment, unemployment, population))
        assert excinfo.value.line == 2

    def test_duplicate_cell_rejected(self, tmp_path):
        employment = "region,year,employed\nR1,2000,100\nR1,2000,101\n"
        unemployment = "region,year,unemployed_6m\nR1,2000,5\n"
        population = "region,year,age_lo,age_hi,persons\nR1,2000,16,64,90\n"
        with pytest.raises(MalformedRow, match="duplicate"):
            parse_regional_series(*_stat_files(tmp_path, employment, unemployment, population))

    def test_overlapping_age_bands(self, tmp_path):
        employment = "region,year,employed\nR1,2000,100\n"
        unemployment = "region,year,unemployed_6m\nR1,2000,5\n"
        population = """
        region,year,age_lo,age_hi,persons
        R1,2000,16,64,90
        R1,2000,60,70,10
        """
        with pytest.raises(OverlappingAgeBands) as excinfo:
            parse_regional_series(*_stat_files(tmp_path, employment, unemployment, population))
        assert excinfo.value.file.endswith("population.csv")
        assert excinfo.value.line == 3
        assert excinfo.value.year == 2000

    def test_bad_header_rejected(self, tmp_path):
        employment = "region,year,jobs\nR1,2000,100\n"
        unemployment = "region,year,unemployed_6m\nR1,2000,5\n"
        population = "region,year,age_lo,age_hi,persons\nR1,2000,16,64,90\n"
        with pytest.raises(MalformedRow) as excinfo:
            parse_regional_series(*_stat_files(tmp_path, employment, unemployment, population))
        assert excinfo.value.line == 1

    def test_wrong_column_count_rejected(self, tmp_path):
        employment = "region,year,employed\nR1,2000\n"
        unemployment = "region,year,unemployed_6m\nR1,2000,5\n"
        population = "region,year,age_lo,age_hi,persons\nR1,2000,16,64,90\n"
        with pytest.raises(MalformedRow, match="columns"):
            parse_regional_series(*_stat_files(tmp_path, employment, unemployment, population))

    def test_age_band_reversed_rejected(self, tmp_path):
        employment = "region,year,employed\nR1,2000,100\n"
        unemployment = "region,year,unemployed_6m\nR1,2000,5\n"
        population = "region,year,age_lo,age_hi,persons\nR1,2000,64,16,90\n"
        with pytest.raises(MalformedRow, match="age_lo"):
            parse_regional_series(*_stat_files(tmp_path, employment, unemployment, population))

    def test_round_trip_identity(self, tmp_path):
        rng = np.random.default_rng(42)
        series = {f"R{i}": random_regional_series(rng, f"R{i}") for i in range(1, 4)}
        paths = (tmp_path / "e.csv", tmp_path / "u.csv", tmp_path / "p.csv")
        write_regional_series(series, *paths)
        reparsed = parse_regional_series(*paths)
        assert reparsed == series
        # and the serialization itself is stable
        write_regional_series(reparsed, tmp_path / "e2.csv", tmp_path / "u2.csv", tmp_path / "p2.csv")
        assert (tmp_path / "e2.csv").read_bytes() == paths[0].read_bytes()

    def test_row_order_does_not_matter(self, tmp_path):
        files = _full_period_files(tmp_path)
        baseline = parse_regional_series(*files)
        shuffler = random.Random(7)
        for path in files:
            lines = path.read_text(encoding="utf-8").splitlines()
            header, data = lines[0], lines[1:]
            shuffler.shuffle(data)
            path.write_text("\n".join([header, *data]) + "\n", encoding="utf-8")
        assert parse_regional_series(*files) == baseline


class TestParseProgrammeRecords:
    def test_two_disjoint_spells(self, tmp_path):
        path = _write(tmp_path / "records.csv", """
        person_id,region,entry_date,spell_start,spell_end,hours_per_week
        P1,R1,2015-03-01,2015-03-01,2015-05-31,20
        P1,R1,2015-03-01,2015-06-10,2015-09-30,25
        """)
        records = parse_programme_records(path)
        assert len(records) == 1
        assert len(records[0].spells) == 2
        assert records[0].spells[0].start_date.isoformat() == "2015-03-01"

    def test_overlapping_spells_rejected(self, tmp_path):
        path = _write(tmp_path / "records.csv", """
        person_id,region,entry_date,spell_start,spell_end,hours_per_week
        P1,R1,2015-03-01,2015-03-01,2015-05-31,20
        P1,R1,2015-03-01,2015-05-31,2015-09-30,25
        """)
        with pytest.raises(OverlappingSpells) as excinfo:
            parse_programme_records(path)
        assert excinfo.value.person_id == "P1"
        assert excinfo.value.line == 3

    def test_empty_file_with_header(self, tmp_path):
        path = _write(tmp_path / "records.csv", "person_id,region,entry_date,spell_start,spell_end,hours_per_week\n")
        assert parse_programme_records(path) == []

    def test_person_with_no_spells(self, tmp_path):
        path = _write(tmp_path / "records.csv", """
        person_id,region,entry_date,spell_start,spell_end,hours_per_week
        P1,R1,2015-03-01,,,
        """)
        records = parse_programme_records(path)
        assert len(records) == 1
        assert records[0].spells == ()

    def test_pre_entry_spell_is_allowed(self, tmp_path):
        path = _write(tmp_path / "records.csv", """
        person_id,region,entry_date,spell_start,spell_end,hours_per_week
        P1,R1,2015-03-01,2014-01-01,2014-06-30,20
        """)
        records = parse_programme_records(path)
        assert len(records[0].spells) == 1

    def test_conflicting_entry_dates_rejected(self, tmp_path):
        path = _write(tmp_path / "records.csv", """
        person_id,region,entry_date,spell_start,spell_end,hours_per_week
        P1,R1,2015-03-01,,,
        P1,R1,2015-04-01,,,
        """)
        with pytest.raises(MalformedRow, match="conflicting entry dates"):
            parse_programme_records(path)

    def test_spell_start_after_end_rejected(self, tmp_path):
        path = _write(tmp_path / "records.csv", """
        person_id,region,entry_date,spell_start,spell_end,hours_per_week
        P1,R1,2015-03-01,2015-05-01,2015-04-01,20
        """)
        with pytest.raises(MalformedRow, match="starts after"):
            parse_programme_records(path)

    def test_partial_spell_fields_rejected(self, tmp_path):
        path = _write(tmp_path / "records.csv", """
        person_id,region,entry_date,spell_start,spell_end,hours_per_week
        P1,R1,2015-03-01,2015-05-01,,20
        """)
        with pytest.raises(MalformedRow, match="all present or all empty"):
            parse_programme_records(path)

    def test_bad_date_carries_file_and_line(self, tmp_path):
        path = _write(tmp_path / "records.csv", """
        person_id,region,entry_date,spell_start,spell_end,hours_per_week
        P1,R1,01/03/2015,,,
        """)
        with pytest.raises(MalformedRow) as excinfo:
            parse_programme_records(path)
        assert excinfo.value.file.endswith("records.csv")
        assert excinfo.value.line == 2

    def test_negative_hours_rejected(self, tmp_path):
        path = _write(tmp_path / "records.csv", """
        person_id,region,entry_date,spell_start,spell_end,hours_per_week
        P1,R1,2015-03-01,2015-03-01,2015-03-31,-4
        """)
        with pytest.raises(MalformedRow, match="hours_per_week"):
            parse_programme_records(path)

    def test_output_is_sorted_and_order_insensitive(self, tmp_path):
        body = [
            "P2,R1,2015-03-01,2015-03-01,2015-05-31,20",
            "P1,R2,2014-02-01,,,",
            "P3,R1,2016-01-15,2016-02-01,2016-03-01,16",
        ]
        header = "person_id,region,entry_date,spell_start,spell_end,hours_per_week"
        path_a = _write(tmp_path / "a.csv", "\n".join([header, *body]) + "\n")
        path_b = _write(tmp_path / "b.csv", "\n".join([header, *reversed(body)]) + "\n")
        records_a = parse_programme_records(path_a)
        records_b = parse_programme_records(path_b)
        assert records_a == records_b
        assert [r.person_id for r in records_a] == ["P1", "P2", "P3"]
