"""
Инфраструктура: файловое хранилище результатов и загрузка экспериментов
"""
