import pytest

from koopcontrol import builtin_system


@pytest.fixture
def f3():
    return builtin_system("finite3")


@pytest.fixture
def c2():
    return builtin_system("collapse2")


@pytest.fixture
def sl():
    return builtin_system("scalarlinear")


@pytest.fixture
def lg():
    return builtin_system("logistic-with-offset")
