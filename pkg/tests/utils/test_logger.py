import logging

import pytest

from src.utils.logger import ColoredFormatter, ContextFilter, _level_from_string, log_context, logger


def test_messages_go_to_stderr_only(capsys):
    log = logger("tests.logger.stderr")
    log.warning("archive full")
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "archive full" in captured.err
    assert "tests.logger.stderr" in captured.err


def test_factory_does_not_stack_handlers():
    first = logger("tests.logger.once")
    second = logger("tests.logger.once")
    assert first is second
    assert len(second.handlers) == 1
    assert second.propagate is False


def test_coloring_leaves_the_record_untouched():
    record = logging.LogRecord("x", logging.ERROR, __file__, 1, "boom", None, None)
    text = ColoredFormatter(fmt="%(levelname)s %(message)s").format(record)
    assert "\033[31mERROR" in text
    assert record.levelname == "ERROR"


def test_unknown_levels_fall_back_to_info():
    assert _level_from_string("debug") == logging.DEBUG
    assert _level_from_string("") == logging.INFO
    assert _level_from_string("chatty") == logging.INFO


def test_context_fields_tag_records(capsys):
    log = logger("tests.logger.context")
    with log_context(run="demo"):
        with log_context(generation=3, side="red"):
            log.info("selected tasks")
        log.info("finished")
    log.info("idle")
    lines = capsys.readouterr().err.splitlines()
    assert "run=demo generation=3 side=red" in lines[0]
    assert "run=demo" in lines[1] and "generation" not in lines[1]
    assert "[\033[2m-\033[0m]" in lines[2]


def test_context_is_restored_after_errors():
    with pytest.raises(RuntimeError):
        with log_context(generation=1):
            raise RuntimeError("duel crashed")
    record = logging.LogRecord("x", logging.INFO, __file__, 1, "m", None, None)
    ContextFilter().filter(record)
    assert record.context == "-"
